#!/usr/bin/env python3
"""Reference PSNR/SSIM values for the metrics cross-check test.

Images come from a 32-bit LCG so the C++ test can regenerate them exactly.
SSIM uses the Gaussian-window settings of Wang et al. (sigma 1.5, population
covariance) as exposed by scikit-image.
"""
import numpy as np
from skimage.metrics import peak_signal_noise_ratio, structural_similarity


class Lcg:
    def __init__(self, seed):
        self.state = seed & 0xFFFFFFFF

    def next(self):
        self.state = (self.state * 1664525 + 1013904223) & 0xFFFFFFFF
        return self.state / 4294967296.0


def make_pair(i):
    h, w = 24 + i, 30 + 2 * i
    rng = Lcg(1000 + i)
    gt = np.array([rng.next() for _ in range(h * w * 3)], dtype=np.float32).reshape(h, w, 3)
    amp = np.float32(0.05 + 0.025 * i)
    noise = np.array([rng.next() for _ in range(h * w * 3)], dtype=np.float32).reshape(h, w, 3)
    pred = np.clip(gt + amp * (np.float32(2) * noise - np.float32(1)), 0, 1).astype(np.float32)
    return gt, pred


def main():
    for i in range(20):
        gt, pred = make_pair(i)
        a, b = gt.astype(np.float64), pred.astype(np.float64)
        psnr = peak_signal_noise_ratio(a, b, data_range=1.0)
        ssim = structural_similarity(a, b, data_range=1.0, channel_axis=2, gaussian_weights=True,
                                     sigma=1.5, use_sample_covariance=False)
        print(f"    {{{psnr:.12f}, {ssim:.12f}}},")


if __name__ == "__main__":
    main()
