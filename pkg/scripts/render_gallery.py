#!/usr/bin/env python3
"""Render every scale level at both test distances into a directory of
PNGs, then decode each one back as a self-check.

    python3 scripts/render_gallery.py --out gallery/
"""

import argparse
from pathlib import Path

from stereoacuity.decoder import estimate_disparity, infer_figure
from stereoacuity.geometry import DisplayProfile, build_level_table
from stereoacuity.pngio import write_png
from stereoacuity.renderer import ORIENTATIONS, StereogramSpec, render


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ppi", type=float, default=264.0)
    parser.add_argument("--out", default="gallery")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--decode", action="store_true", help="decode each PNG back")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    profile = DisplayProfile(ppi=args.ppi)

    for distance in (0.5, 3.0):
        table = build_level_table(profile, distance)
        for level in table.levels:
            orientation = ORIENTATIONS[(level.index - 1) % 4]
            spec = StereogramSpec(
                profile=profile,
                distance_m=distance,
                level=level,
                orientation=orientation,
                seed=args.seed,
            )
            name = f"d{distance}m_level{level.index:02d}_{level.arcsec_rounded}arcsec_{orientation.value}.png"
            img = render(spec)
            write_png(img, out / name)
            line = f"{name}: shift {level.pixel_shift} px"
            if args.decode:
                dmap = estimate_disparity(img, search_range=12)
                shift, detection = infer_figure(dmap)
                ok = shift == level.pixel_shift and detection.orientation is orientation
                line += f" -> decoded {shift} px {detection.orientation.value} {'OK' if ok else 'MISMATCH'}"
            print(line)


if __name__ == "__main__":
    main()
