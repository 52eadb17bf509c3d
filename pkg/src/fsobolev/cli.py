"""Command-line interface: spectra, reports, kernel values and the verification suites."""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from . import verify
from .asymptotics import build_matrix, build_report, canonical_mode
from .bargmann import IMAGE_CONSTANT_PROOF, IMAGE_CONSTANT_STATEMENT, measured_image_constant, unitarity_check
from .kernels import KernelConfig, PWParams, kernel_ft, kernel_mehler, kernel_resolvent, kernel_series, pw_kernel
from .operators import dump_matrix
from .quadrature_special import h_gram
from .spectra import NumericalFailure, eigvals_symmetric

EXIT_OK, EXIT_VERIFY, EXIT_ARGS, EXIT_NUMERIC = 0, 1, 2, 3
MODES = ("two-sided", "one-sided", "freq-sided", "pw")


class ArgumentError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    mode: str | None = None
    R: float | None = None
    T: float | None = None
    dim: int | None = None
    eps: float = 0.1
    out: str | None = None
    format: str = "csv"
    threads: int | None = None
    R_list: tuple[float, ...] | None = None
    dump_matrix: str | None = None

    def validate(self) -> "RunConfig":
        if not 0 < self.eps < 0.5:
            raise ArgumentError("--eps must be in (0, 0.5)")
        if self.dim is not None and self.dim < 1:
            raise ArgumentError("--dim must be positive")
        if self.threads is not None and self.threads < 1:
            raise ArgumentError("--threads must be positive")
        if self.command in ("spectrum", "report"):
            if self.mode is None:
                raise ArgumentError("--mode is required")
            radii = self.R_list if self.R_list else (self.R,)
            if any(r is None for r in radii):
                raise ArgumentError("--R is required")
            if any(not (math.isfinite(r) and r > 0) for r in radii):
                raise ArgumentError("R must be positive")
            if canonical_mode(self.mode) != "one_sided":
                if self.T is None:
                    raise ArgumentError("--T is required for this mode")
                if not (math.isfinite(self.T) and self.T > 0):
                    raise ArgumentError("T must be positive")
            if self.command == "report" and self.format != "json":
                raise ArgumentError("report output is JSON only")
            if self.R_list and self.command != "report":
                raise ArgumentError("--R-list applies to report only")
        return self


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad list {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fsobolev", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_mode=True):
        if need_mode:
            sp.add_argument("--mode", choices=MODES + tuple(m.replace("-", "_") for m in MODES[:3]))
        sp.add_argument("--R", type=float)
        sp.add_argument("--T", type=float)
        sp.add_argument("--dim", type=int)
        sp.add_argument("--eps", type=float, default=0.1)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--threads", type=int)

    sp = sub.add_parser("spectrum", help="eigenvalues of a concentration operator")
    common(sp)
    sp.add_argument("--dump-matrix", dest="dump_matrix")
    sp = sub.add_parser("report", help="moments, counts and predictions as JSON")
    common(sp)
    sp.add_argument("--R-list", dest="R_list", type=_float_list)
    sp = sub.add_parser("kernel", help="reproducing kernel values at (x, y) in every representation")
    common(sp, need_mode=False)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--y", type=float, required=True)
    sp = sub.add_parser("gram", help="deviation of the basis Gram matrix from the identity")
    common(sp, need_mode=False)
    sub_bc = sub.add_parser("bargmann-check", help="Fock norms of transformed basis elements and constants")
    common(sub_bc, need_mode=False)
    sp = sub.add_parser("verify", help="run an invariant suite")
    sp.add_argument("suite")
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out")
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    fmt = getattr(ns, "format", None) or ("json" if ns.command == "report" else "csv")
    return RunConfig(
        command=ns.command,
        mode=getattr(ns, "mode", None),
        R=getattr(ns, "R", None),
        T=getattr(ns, "T", None),
        dim=getattr(ns, "dim", None),
        eps=getattr(ns, "eps", 0.1),
        out=getattr(ns, "out", None),
        format=fmt,
        threads=ns.threads,
        R_list=getattr(ns, "R_list", None),
        dump_matrix=getattr(ns, "dump_matrix", None),
    ).validate()


def _threads(cfg: RunConfig) -> int | None:
    if cfg.threads is not None:
        return cfg.threads
    env = os.environ.get("CONC_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ArgumentError("CONC_THREADS must be an integer") from exc
        if n < 1:
            raise ArgumentError("CONC_THREADS must be positive")
        return n
    return None


def _fmt(v: float) -> str:
    return "%.17g" % v


def cmd_spectrum(cfg: RunConfig) -> str:
    m = build_matrix(cfg.mode, cfg.R, cfg.T, cfg.dim)
    s = eigvals_symmetric(m)
    if cfg.dump_matrix:
        dump_matrix(m, cfg.dump_matrix)
    if cfg.format == "json":
        doc = {"mode": canonical_mode(cfg.mode), "R": cfg.R, "T": cfg.T, "dim": m.dim, "eigenvalues": s.eigenvalues.tolist()}
        return json.dumps(doc) + "\n"
    buf = io.StringIO()
    buf.write("index,eigenvalue\n")
    for i, v in enumerate(s.eigenvalues):
        buf.write(f"{i},{_fmt(v)}\n")
    return buf.getvalue()


def cmd_report(cfg: RunConfig) -> str:
    if cfg.R_list:
        docs = [build_report(cfg.mode, r, cfg.T, cfg.eps, cfg.dim).to_dict() for r in cfg.R_list]
        return json.dumps(docs, indent=2) + "\n"
    return json.dumps(build_report(cfg.mode, cfg.R, cfg.T, cfg.eps, cfg.dim).to_dict(), indent=2) + "\n"


def cmd_kernel(cfg: RunConfig, x: float, y: float) -> str:
    rows = [
        ("mehler", kernel_mehler(x, y), 0.0),
        ("resolvent", kernel_resolvent(x, y), 0.0),
        ("series_partial_sum", kernel_series(x, y, KernelConfig()), 0.0),
    ]
    k = kernel_ft(x, y)
    rows.append(("fourier", k.real, k.imag))
    if cfg.T is not None:
        if not cfg.T > 0:
            raise ArgumentError("T must be positive")
        rows.append(("paley_wiener", float(pw_kernel(PWParams(cfg.T), x, y)), 0.0))
    if cfg.format == "json":
        return json.dumps({"x": x, "y": y, "values": {n: [re, im] for n, re, im in rows}}) + "\n"
    return "representation,real,imag\n" + "".join(f"{n},{_fmt(re)},{_fmt(im)}\n" for n, re, im in rows)


def cmd_gram(cfg: RunConfig) -> tuple[str, int]:
    count = cfg.dim or 48
    dev = float(np.abs(h_gram(count) - np.eye(count)).max())
    ok = dev < 1e-8
    if cfg.format == "json":
        return json.dumps({"count": count, "max_deviation": dev, "pass": ok}) + "\n", EXIT_OK if ok else EXIT_VERIFY
    return f"count,max_deviation\n{count},{_fmt(dev)}\n", EXIT_OK if ok else EXIT_VERIFY


def cmd_bargmann_check(cfg: RunConfig) -> str:
    res = [unitarity_check(n) for n in range(7)]
    image = abs(measured_image_constant(0))
    if cfg.format == "json":
        return json.dumps(
            {
                "basis": [{"n": r.n, "b1_norm": r.b1_norm_of_image, "b0_ratio": r.b0_ratio} for r in res],
                "b0_constant": float(np.mean([r.b0_ratio for r in res])),
                "image_constant_measured": image,
                "image_constant_candidates": [IMAGE_CONSTANT_STATEMENT, IMAGE_CONSTANT_PROOF],
            }
        ) + "\n"
    lines = ["n,b1_norm,b0_ratio"] + [f"{r.n},{_fmt(r.b1_norm_of_image)},{_fmt(r.b0_ratio)}" for r in res]
    lines.append(f"# b0_constant={_fmt(np.mean([r.b0_ratio for r in res]))} (1/pi={_fmt(1 / math.pi)})")
    lines.append(f"# image_constant={_fmt(image)} (2^(1/4)/pi={_fmt(IMAGE_CONSTANT_PROOF)}, sqrt(2)/pi^(1/4)={_fmt(IMAGE_CONSTANT_STATEMENT)})")
    return "\n".join(lines) + "\n"


def cmd_verify(suite: str) -> tuple[str, int]:
    checks = verify.run_suite(suite)
    text = "".join(c.line() + "\n" for c in checks)
    return text, EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ARGS if exc.code else EXIT_OK
    try:
        if ns.command == "verify":
            if ns.suite not in verify.SUITES:
                raise ArgumentError(f"unknown suite {ns.suite!r}; choose from {', '.join(verify.SUITES)}")
            cfg = RunConfig(command="verify", threads=ns.threads, out=ns.out).validate()
        else:
            cfg = _config(ns)
        with threadpool_limits(limits=_threads(cfg)):
            code = EXIT_OK
            if cfg.command == "spectrum":
                text = cmd_spectrum(cfg)
            elif cfg.command == "report":
                text = cmd_report(cfg)
            elif cfg.command == "kernel":
                text = cmd_kernel(cfg, ns.x, ns.y)
            elif cfg.command == "gram":
                text, code = cmd_gram(cfg)
            elif cfg.command == "bargmann-check":
                text = cmd_bargmann_check(cfg)
            else:
                text, code = cmd_verify(ns.suite)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArgumentError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    _emit(text, cfg.out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
