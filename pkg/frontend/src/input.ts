import type { Orientation } from "./api";

// Arrow keys and tap quadrants both map onto the four gap orientations.

export function orientationFromKey(key: string): Orientation | null {
  switch (key) {
    case "ArrowUp":
      return "up";
    case "ArrowDown":
      return "down";
    case "ArrowLeft":
      return "left";
    case "ArrowRight":
      return "right";
    default:
      return null;
  }
}

// Quadrants are split along the diagonals: a tap counts toward whichever
// edge of the screen it is closest to in angle from the center.
export function orientationFromTap(
  x: number,
  y: number,
  width: number,
  height: number,
): Orientation {
  const dx = x - width / 2;
  const dy = y - height / 2;
  if (Math.abs(dx) > Math.abs(dy)) {
    return dx > 0 ? "right" : "left";
  }
  return dy > 0 ? "down" : "up";
}
