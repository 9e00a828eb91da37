"""Command-line interface.

Exit status: 0 success, 1 usage error, 2 capacity error, 3 wrong key or
mark mismatch, 4 malformed input.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys

from . import analysis, pipeline
from .bitprep import PrepConfig
from .bits import bits_to_bytes, bytes_to_bits
from .cipher import parse_key
from .errors import CapacityError, ConfigError, FormatError, KeyMismatchError, LPCError
from .imageio import read_pgm, write_pgm

ENC_KEY_ENV = "LPC_ENC_KEY"
HIDE_KEY_ENV = "LPC_HIDE_KEY"

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_KEY, EXIT_FORMAT = range(5)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _resolve_key(flag_value, env_var, flag_name):
    text = flag_value or os.environ.get(env_var)
    if not text:
        raise UsageError(f"{flag_name} or ${env_var} is required")
    return parse_key(text)


def _write_bytes(path, data: bytes) -> None:
    tmp = f"{path}.part"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _config(args) -> PrepConfig:
    return PrepConfig(lam=args.lam, tau=args.tau)


def _report_row(name, report, npix, tau, lam) -> dict:
    return {
        "image": name, "tau": tau, "lam": lam, "theta": report.theta,
        "unused_info_bits": report.unused_info_bits, "used_info_bits": report.used_info_bits,
        "header_bits": report.header_bits, "aux_total": report.aux_total,
        "aux_bpp": f"{report.aux_total / npix:.4f}", "room_total": report.room_total,
        "room_bpp": f"{report.room_total / npix:.4f}", "phi": report.phi,
        "eta": f"{report.eta:.4f}", "error": "",
    }


def cmd_protect(args):
    img = read_pgm(args.input)
    key = _resolve_key(args.enc_key, ENC_KEY_ENV, "--enc-key")
    cfg = _config(args)
    encrypted, _, report = pipeline.protect_with_report(img, cfg, key)
    write_pgm(args.output, encrypted)
    analysis.write_csv([_report_row(args.input, report, img.size, cfg.tau, cfg.lam)], sys.stdout)


def cmd_capacity(args):
    img = read_pgm(args.input)
    cfg = _config(args)
    report = pipeline.capacity(img, cfg)
    analysis.write_csv([_report_row(args.input, report, img.size, cfg.tau, cfg.lam)], sys.stdout)


def cmd_embed(args):
    img = read_pgm(args.input)
    key = _resolve_key(args.hide_key, HIDE_KEY_ENV, "--hide-key")
    with open(args.payload, "rb") as fh:
        payload = bytes_to_bits(fh.read())
    write_pgm(args.output, pipeline.embed(img, payload, key))


def _payload_bytes(bits) -> bytes:
    if bits.size % 8:
        raise FormatError(f"extracted payload is {bits.size} bits, not a whole number of bytes")
    return bits_to_bytes(bits)


def cmd_extract(args):
    img = read_pgm(args.input)
    key = _resolve_key(args.hide_key, HIDE_KEY_ENV, "--hide-key")
    _write_bytes(args.output, _payload_bytes(pipeline.extract(img, key)))


def cmd_decrypt(args):
    img = read_pgm(args.input)
    key = _resolve_key(args.enc_key, ENC_KEY_ENV, "--enc-key")
    write_pgm(args.output, pipeline.recover_image(img, key))


def cmd_recover(args):
    img = read_pgm(args.input)
    enc = _resolve_key(args.enc_key, ENC_KEY_ENV, "--enc-key")
    hide = _resolve_key(args.hide_key, HIDE_KEY_ENV, "--hide-key")
    original, bits = pipeline.recover_full(img, enc, hide)
    data = _payload_bytes(bits)
    write_pgm(args.output, original)
    _write_bytes(args.payload, data)


ANALYZE_FIELDS = ["image", "chi2", "p_value", "uniform", "entropy_h", "entropy_v"] + [
    f"ones_bit{k}" for k in range(8)]


def cmd_analyze(args):
    img = read_pgm(args.input)
    rep = analysis.uniformity_report(img)
    row = {"image": args.input, "chi2": f"{rep.chi2:.3f}", "p_value": f"{rep.p_value:.6g}",
           "uniform": int(rep.uniform), "entropy_h": f"{rep.entropy_h:.4f}",
           "entropy_v": f"{rep.entropy_v:.4f}"}
    row.update({f"ones_bit{k}": f"{v:.4f}" for k, v in enumerate(rep.plane_ones)})
    if args.hist:
        _write_bytes(args.hist, analysis.histogram_text(img).encode())
    writer = csv.DictWriter(sys.stdout, fieldnames=ANALYZE_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerow(row)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lpc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help, *, out=True, cfg=False, enc=False, hide=False, payload=None):
        p = sub.add_parser(name, help=help)
        p.add_argument("--in", dest="input", required=True, help="input PGM image")
        if out:
            p.add_argument("--out", dest="output", required=True, help="output file")
        if cfg:
            p.add_argument("--tau", type=int, default=32, help="block side (default 32)")
            p.add_argument("--lambda", dest="lam", type=int, default=3,
                           help="low-plane bit count (default 3)")
        if enc:
            p.add_argument("--enc-key", help=f"64 hex chars (or ${ENC_KEY_ENV})")
        if hide:
            p.add_argument("--hide-key", help=f"64 hex chars (or ${HIDE_KEY_ENV})")
        if payload:
            p.add_argument("--payload", required=True, help=payload)
        p.set_defaults(func=func)
        return p

    add("protect", cmd_protect, "reserve room and encrypt; prints the capacity report",
        cfg=True, enc=True)
    add("embed", cmd_embed, "hide a payload file in an encrypted image", hide=True,
        payload="payload file to embed")
    add("extract", cmd_extract, "extract the payload with the data-hiding key", hide=True)
    add("decrypt", cmd_decrypt, "decrypt and rebuild the image with the encryption key", enc=True)
    add("recover", cmd_recover, "recover image and payload with both keys", enc=True, hide=True,
        payload="where to write the extracted payload")
    add("capacity", cmd_capacity, "print the capacity report only", out=False, cfg=True)
    an = add("analyze", cmd_analyze, "print uniformity and difference statistics", out=False)
    an.add_argument("--hist", help="also write a 256-line bin,count histogram here")
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        return _fail(EXIT_USAGE, f"usage: {exc}")
    except CapacityError as exc:
        return _fail(EXIT_CAPACITY, str(exc))
    except KeyMismatchError as exc:
        return _fail(EXIT_KEY, str(exc))
    except FormatError as exc:
        return _fail(EXIT_FORMAT, str(exc))
    except (ConfigError, LPCError) as exc:
        return _fail(EXIT_USAGE, str(exc))
    except OSError as exc:
        return _fail(EXIT_USAGE, f"{exc.filename or ''}: {exc.strerror or exc}")
    return EXIT_OK


def _fail(code: int, message: str) -> int:
    print(f"lpc: {message}", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())
