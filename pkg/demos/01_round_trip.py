"""Walk one image through the three roles: content owner, data hider, receiver.

    python demos/01_round_trip.py
"""
import numpy as np
from skimage import data

from lpc import KeyMaterial, PrepConfig, embed, extract, protect_with_report, psnr, recover_full, recover_image

image = data.camera()
keys = KeyMaterial.generate()

# The content owner reserves room and encrypts. Only the encryption key is needed.
encrypted, layout, report = protect_with_report(image, PrepConfig(lam=3, tau=32), keys.enc_key)
print(f"reserved {report.room_total} room bits, {report.aux_total} spent on recovery data")
print(f"payload capacity: {report.max_payload} bits ({report.eta:.3f} bpp)")

# The data hider knows neither tau nor the image. The hiding key locates the payload area.
message = "The quick brown fox jumps over the lazy dog. " * 200
payload = np.unpackbits(np.frombuffer(message.encode(), np.uint8))
marked = embed(encrypted, payload, keys.hide_key)
print(f"embedded {payload.size} bits")

# Receiver holding only the hiding key: the message, but no image.
text = np.packbits(extract(marked, keys.hide_key)).tobytes().decode()
print("extracted text matches:", text == message)

# Receiver holding only the encryption key: the exact image, no message.
print("decrypted image PSNR:", psnr(recover_image(marked, keys.enc_key), image))

# Receiver holding both keys.
restored, bits = recover_full(marked, keys.enc_key, keys.hide_key)
print("both keys, image identical:", np.array_equal(restored, image),
      "payload identical:", np.array_equal(bits, payload))
