// Test configuration: which display, how far away, which server.

export interface DisplayPreset {
  label: string;
  ppi: number;
}

export const DISPLAY_PRESETS: Record<string, DisplayPreset> = {
  "ipad-retina-264": { label: "iPad retina (264 ppi)", ppi: 264 },
  "ipad-mini-326": { label: "iPad mini retina (326 ppi)", ppi: 326 },
};

export const DISTANCE_PRESETS: Record<string, number> = {
  near: 0.5,
  far: 3.0,
};

export interface UiConfig {
  serverUrl: string;
  ppi: number;
  distanceM: number;
}

export const DEFAULT_SERVER_URL = "http://127.0.0.1:8787";

export function validateConfig(config: UiConfig): string | null {
  if (!config.serverUrl) return "server URL is required";
  if (!(config.ppi > 0)) return "pixel density must be positive";
  if (!(config.distanceM > 0)) return "viewing distance must be positive";
  return null;
}
