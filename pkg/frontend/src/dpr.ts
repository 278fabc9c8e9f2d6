// One image pixel must land on exactly one device pixel: the server
// quantizes disparity in whole pixels, so any browser rescaling would
// corrupt the stimulus. The image is laid out at imagePx / devicePixelRatio
// CSS pixels with pixelated rendering, which covers whole device pixels
// whenever the device-pixel ratio is an integer. A fractional ratio means
// browser zoom or OS scaling is active and the raster would be resampled,
// so the UI shows a calibration warning instead of silently scaling.

export function cssSizeForDevicePixels(imagePx: number, dpr: number): number {
  return imagePx / dpr;
}

export function pixelMappingExact(imagePx: number, dpr: number): boolean {
  if (!(dpr > 0) || !Number.isInteger(dpr)) return false;
  return Number.isInteger(imagePx);
}

export function mappingWarning(imagePx: number, dpr: number): string | null {
  if (pixelMappingExact(imagePx, dpr)) return null;
  return (
    `display scale ${dpr} cannot show the ${imagePx} px stimulus 1:1; ` +
    "set browser zoom to 100% / use an integer display scale"
  );
}
