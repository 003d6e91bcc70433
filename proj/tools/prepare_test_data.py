#!/usr/bin/env python3
"""Regenerates tests/data from the sample images shipped with scikit-image.

Clear images and disparity maps are written as PNG. The low-light hazy set
is produced afterwards by `nighthaze synth` (see tests/data/README.md).
"""

import argparse
import os

import numpy as np
from PIL import Image
import skimage.data


def save_rgb(path, rgb):
    Image.fromarray(rgb.astype(np.uint8), "RGB").save(path, optimize=True)


def save_disparity(path, disp):
    disp = np.where(np.isfinite(disp), disp, 0.0).astype(np.float64)
    disp = np.clip(disp / disp.max(), 0.0, 1.0)
    Image.fromarray(np.round(disp * 65535).astype(np.uint16)).save(path)


def resize(rgb, longest):
    h, w = rgb.shape[:2]
    scale = longest / max(h, w)
    if scale >= 1.0:
        return rgb
    size = (int(round(w * scale)), int(round(h * scale)))
    return np.asarray(Image.fromarray(rgb).resize(size, Image.LANCZOS))


def ground_plane_disparity(h, w):
    # Depth grows toward the top of the frame: near at the bottom, far above.
    rows = np.linspace(0.25, 1.0, h)[:, None]
    return np.repeat(rows, w, axis=1)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "tests", "data"))
    args = parser.parse_args()
    clear_dir = os.path.join(args.out, "clear")
    os.makedirs(clear_dir, exist_ok=True)

    left, _, disp = skimage.data.stereo_motorcycle()
    save_rgb(os.path.join(args.out, "motorcycle_left.png"), left)
    save_disparity(os.path.join(args.out, "motorcycle_disp.png"), disp)

    for name in ("astronaut", "coffee", "chelsea", "rocket"):
        rgb = resize(getattr(skimage.data, name)(), 320)
        save_rgb(os.path.join(clear_dir, f"{name}.png"), rgb)
        h, w = rgb.shape[:2]
        save_disparity(os.path.join(clear_dir, f"{name}_disp.png"), ground_plane_disparity(h, w))

    small = resize(left, 320)
    save_rgb(os.path.join(clear_dir, "motorcycle.png"), small)
    disp_img = Image.fromarray(np.where(np.isfinite(disp), disp, 0.0).astype(np.float32))
    disp_small = np.asarray(disp_img.resize((small.shape[1], small.shape[0]), Image.NEAREST))
    save_disparity(os.path.join(clear_dir, "motorcycle_disp.png"), disp_small)


if __name__ == "__main__":
    main()
