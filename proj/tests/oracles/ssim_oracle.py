"""Reference SSIM values for tests/test_reconstruct.cpp, from scikit-image.

Gaussian window sigma=1.5 (11x11 after truncation), K1=0.01, K2=0.03,
data range 1, population covariance, mean over the valid interior.
"""
import numpy as np
from skimage.metrics import structural_similarity


def frames(w=24, h=20):
    y, x = np.mgrid[0:h, 0:w].astype(float)
    a = (np.sin(0.3 * x) + np.cos(0.2 * y) + 2) / 4
    b = np.clip(a + 0.1 * np.sin(0.7 * x * y / 5.0), 0, 1)
    return a, b


def ssim(a, b):
    return structural_similarity(a, b, gaussian_weights=True, sigma=1.5,
                                 use_sample_covariance=False, data_range=1.0)


if __name__ == "__main__":
    a, b = frames()
    print("ssim(a, b):", repr(ssim(a, b)))
    print("ssim(a, 1 - a):", repr(ssim(a, 1 - a)))
