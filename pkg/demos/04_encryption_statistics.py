"""What an observer of the encrypted image sees: flat histogram, no spatial structure.

    python demos/04_encryption_statistics.py
"""
from skimage import data

from lpc import KeyMaterial, PrepConfig, protect
from lpc.analysis import uniformity_report

image = data.camera()
encrypted = protect(image, PrepConfig(), KeyMaterial.generate().enc_key)

for name, img in (("original", image), ("encrypted", encrypted)):
    rep = uniformity_report(img)
    print(f"{name:9s}  chi2={rep.chi2:10.1f}  p={rep.p_value:.3f}  uniform={rep.uniform}  "
          f"H(diff_h)={rep.entropy_h:.2f}  H(diff_v)={rep.entropy_v:.2f} bits")
    print("           ones per bit plane:", " ".join(f"{f:.3f}" for f in rep.plane_ones))
