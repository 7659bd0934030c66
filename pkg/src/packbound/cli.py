"""Command-line front end.

Subcommands: code, lattice, qseries, magic, lpbound, verify.  Exit codes:
0 success/verified, 1 refuted, 2 usage error, 3 numerically inconclusive.

Artifacts are deterministic: JSON is emitted with sorted keys, numbers are
rendered at fixed precision, no timestamps, and every artifact embeds the
run configuration and library version.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

import mpmath as mp

from . import __version__
from .codes import code_properties, golay24, hamming8, weight_enumerator
from .lattices import (
    covolume, density, lattice_properties, standard_lattice, vectors_by_norm,
)
from .qseries import named_form
from .certify import certify_magic, poisson_check
from .magic import ce_bound_from_function, magic_spec
from . import lpbound as lp

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


@dataclass(frozen=True)
class RunConfig:
    precision: int = 60
    trunc: int = 300
    budget: int = 64
    fmt: str = "text"

    def validate(self):
        if not (10 <= self.precision <= 200):
            raise ValueError("precision out of range [10, 200]")
        if not (50 <= self.trunc <= 2000):
            raise ValueError("trunc out of range [50, 2000]")
        if not (1 <= self.budget <= 512):
            raise ValueError("budget out of range [1, 512]")
        if self.fmt not in ("json", "csv", "text"):
            raise ValueError("format must be json, csv or text")
        return self


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _artifact(payload: dict, cfg: RunConfig) -> str:
    doc = {"version": __version__, "config": asdict(cfg)}
    doc.update(payload)
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _nstr(x, digits=17):
    return mp.nstr(mp.mpf(x), digits, strip_zeros=True)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_code(args, cfg):
    code = {"hamming8": hamming8, "golay24": golay24}[args.name]()
    weights = weight_enumerator(code).as_dict()
    props = code_properties(code)
    payload = {
        "name": args.name,
        "length": code.length,
        "dimension": code.dimension,
        "generator": code.generator_strings(),
        "weights": {str(k): v for k, v in sorted(weights.items())},
        "self_dual": props["self_dual"],
        "doubly_even": props["doubly_even"],
    }
    if cfg.fmt == "json" or args.json:
        _emit(_artifact(payload, cfg), args.out)
    else:
        lines = [f"{args.name}: [{code.length}, {code.dimension}] binary code",
                 f"weights: {weights}",
                 f"self-dual: {props['self_dual']}, doubly even: "
                 f"{props['doubly_even']}"]
        _emit("\n".join(lines), args.out)
    return EXIT_OK


def _lattice_by_name(name, n):
    if name == "zn":
        return standard_lattice("zn", n or 1)
    return standard_lattice(name)


def _cmd_lattice(args, cfg):
    lat = _lattice_by_name(args.name, args.n)
    if args.action == "info":
        props = lattice_properties(lat)
        dens = density(lat)
        min_norm = props["min_sq_norm"]
        payload = {
            "name": lat.name,
            "dimension": lat.dimension,
            "min_sq_norm": int(min_norm) if min_norm.denominator == 1
            else str(min_norm),
            "kissing": props["kissing"],
            "even": props["even"],
            "unimodular": props["unimodular"],
            "covolume": str(covolume(lat)),
            "density": str(dens),
            "density_float": float(dens.to_float()),
        }
        if cfg.fmt == "json" or args.json:
            _emit(_artifact(payload, cfg), args.out)
        else:
            _emit("\n".join(f"{k}: {v}" for k, v in payload.items()),
                  args.out)
        return EXIT_OK
    # theta table
    table = vectors_by_norm(lat, Fraction(args.max_norm),
                            budget=Fraction(max(args.max_norm, cfg.budget)))
    _emit(table.to_csv(), args.out)
    return EXIT_OK


def _cmd_qseries(args, cfg):
    series = named_form(args.name, trunc=cfg.trunc)
    if cfg.fmt == "csv" or args.csv:
        _emit(series.dump_csv(), args.out)
        return EXIT_OK
    terms = []
    shown = 0
    for e, c in series.items():
        if shown >= args.terms:
            break
        terms.append({"exponent_eighths": e, "coefficient": str(c)})
        shown += 1
    payload = {"name": args.name, "trunc": series.trunc, "terms": terms}
    if cfg.fmt == "json":
        _emit(_artifact(payload, cfg), args.out)
    else:
        body = ", ".join(t["coefficient"] for t in terms)
        _emit(f"{args.name}: {body}", args.out)
    return EXIT_OK


def _cmd_magic(args, cfg):
    spec = magic_spec(args.dim, trunc=cfg.trunc, dps=cfg.precision)
    if args.action == "eval":
        with mp.workdps(cfg.precision + 10):
            f = spec.eval("f", mp.mpf(args.r))
            fh = spec.eval("f_hat", mp.mpf(args.r))
        payload = {"dim": args.dim, "r": _nstr(args.r),
                   "f": _nstr(f.value), "f_err": _nstr(f.error, 3),
                   "fhat": _nstr(fh.value), "fhat_err": _nstr(fh.error, 3)}
        if cfg.fmt == "json":
            _emit(_artifact(payload, cfg), args.out)
        else:
            _emit(f"f({payload['r']}) = {payload['f']} (+- {payload['f_err']})\n"
                  f"fhat({payload['r']}) = {payload['fhat']} "
                  f"(+- {payload['fhat_err']})", args.out)
        return EXIT_OK
    if args.action == "table":
        lines = ["r,f,f_err,fhat,fhat_err"]
        with mp.workdps(cfg.precision + 10):
            r = mp.mpf(0)
            step = mp.mpf(args.step)
            while r <= args.rmax + 1e-12:
                f = spec.eval("f", r)
                fh = spec.eval("f_hat", r)
                lines.append(",".join([
                    _nstr(r, 12), _nstr(f.value), _nstr(f.error, 3),
                    _nstr(fh.value), _nstr(fh.error, 3)]))
                r += step
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    # check
    cert = certify_magic(args.dim, spec)
    bound = None
    if cert.status == "verified":
        b = ce_bound_from_function(args.dim, spec, certificate=cert)
        bound = {"value": _nstr(b.value), "error": _nstr(b.error, 3)}
    payload = {"dim": args.dim,
               "certificate": json.loads(cert.to_json()),
               "replay": f"packbound --precision {cfg.precision} "
                         f"--trunc {cfg.trunc} magic check --dim {args.dim} "
                         f"--report json",
               "bound": bound}
    if args.report == "json" or cfg.fmt == "json":
        _emit(_artifact(payload, cfg), args.out)
    else:
        _emit(f"certificate: {cert.status}\n"
              + "\n".join(f"  [{'ok' if s['passed'] else 'FAIL'}] "
                          f"{s['statement']} ({s['bound']})"
                          for s in cert.log), args.out)
    return {"verified": EXIT_OK, "refuted": EXIT_REFUTED}.get(
        cert.status, EXIT_INCONCLUSIVE)


def _default_schedule(dim, degree):
    """Double-root placements at the normalized vector lengths: the function
    side starts at the second length (the first carries the simple root),
    the transform side at the first."""
    r1_sq = 2 if dim == 8 else 4
    pairs = (degree - 1) // 2
    k_f = (pairs + 1) // 2
    k_h = pairs - k_f
    base = r1_sq // 2
    roots_f = [(2 * (base + 1 + j) / r1_sq) ** 0.5 for j in range(k_f)]
    roots_h = [(2 * (base + j) / r1_sq) ** 0.5 for j in range(k_h)]
    return roots_f, roots_h


def _cmd_lpbound(args, cfg):
    if args.action == "export-sdp":
        text = lp.export_sos_sdp(args.dim, args.degree)
        _emit(text, args.out)
        return EXIT_OK
    dim, degree = args.dim, args.degree
    if args.method == "sampled":
        res = lp.sampled_lp(dim, degree, dps=cfg.precision // 2 + 10)
        feasible = res["feasible_report"]["feasible"]
        payload = {
            "n": dim, "d": degree, "method": "sampled",
            "bound": res["bound"],
            "f0": res["f0"],
            "certificate_status": "grid-feasible" if feasible
            else "violations remain",
            "feasible_report": res["feasible_report"],
        }
    else:
        roots_f, roots_h = _default_schedule(dim, degree)
        degree_eff = 1 + 2 * (len(roots_f) + len(roots_h))
        if args.method == "forced":
            sol = lp.forced_roots_solve(dim, degree_eff, 1.0, roots_f, roots_h,
                                        dps=cfg.precision)
            from .lattices import ball_volume
            bound = float(sol["f0"]) * ball_volume(
                dim, Fraction(1, 4)).to_float()
            payload = {"n": dim, "d": degree_eff, "method": "forced",
                       "bound": bound, "f0": float(sol["f0"]),
                       "residual": _nstr(sol["residual"], 3),
                       "condition": _nstr(sol["condition"], 3),
                       "certificate_status": "uncertified"}
        else:
            res = lp.newton_refine(dim, degree_eff, roots_f, roots_h,
                                   dps=cfg.precision)
            payload = {"n": dim, "d": degree_eff, "method": "newton",
                       "bound": res["bound"], "f0": float(res["f0"]),
                       "roots_f": res["roots_f"],
                       "roots_fhat": res["roots_fhat"],
                       "certificate_status": "uncertified"}
    from .lattices import density
    opt = density(standard_lattice("e8" if dim == 8 else "leech")).to_float() \
        if dim in (8, 24) else None
    if opt:
        payload["bound_over_optimal"] = payload["bound"] / opt
    _emit(_artifact(payload, cfg) if cfg.fmt != "text"
          else "\n".join(f"{k}: {v}" for k, v in payload.items()),
          args.out)
    return EXIT_OK


def _cmd_verify(args, cfg):
    if args.target == "magic":
        cert = certify_magic(args.dim, magic_spec(args.dim, trunc=cfg.trunc,
                                                  dps=cfg.precision))
        replay = (f"packbound --precision {cfg.precision} --trunc "
                  f"{cfg.trunc} verify magic --dim {args.dim}")
        _emit(_artifact({"certificate": json.loads(cert.to_json()),
                         "replay": replay}, cfg), args.out)
        return {"verified": EXIT_OK, "refuted": EXIT_REFUTED}.get(
            cert.status, EXIT_INCONCLUSIVE)
    if args.target == "poisson":
        lat = _lattice_by_name(args.name, args.n)
        res = poisson_check(lat, Fraction(args.sigma), args.cutoff)
        ok = res["residual"] <= args.tolerance
        payload = {"lattice": lat.name, "sigma": res["sigma"],
                   "cutoff": res["cutoff"],
                   "residual": _nstr(res["residual"], 6),
                   "tolerance": args.tolerance, "passed": bool(ok),
                   "replay": f"packbound verify poisson --name {args.name} "
                             f"--sigma {args.sigma} --cutoff {args.cutoff}"}
        _emit(_artifact(payload, cfg), args.out)
        return EXIT_OK if ok else EXIT_REFUTED
    # sos
    with open(args.cert) as fh:
        cert = sos_certificate_from_json(fh.read())
    result = lp.verify_sos(cert)
    _emit(_artifact({"certificate": json.loads(result.to_json()),
                     "replay": f"packbound verify sos --cert {args.cert}"},
                    cfg), args.out)
    return EXIT_OK if result.status == "verified" else EXIT_REFUTED


def sos_certificate_to_json(cert: lp.SosCertificate) -> str:
    return json.dumps({
        "n": cert.n, "d": cert.d,
        "a": [str(x) for x in cert.a],
        "y0": str(cert.y0),
        "q1": [[str(x) for x in row] for row in cert.q1],
        "q2": [[str(x) for x in row] for row in cert.q2],
    }, sort_keys=True, indent=1)


def sos_certificate_from_json(text: str) -> lp.SosCertificate:
    obj = json.loads(text)
    return lp.SosCertificate(
        obj["n"], obj["d"],
        tuple(Fraction(x) for x in obj["a"]),
        Fraction(obj["y0"]),
        tuple(tuple(Fraction(x) for x in row) for row in obj["q1"]),
        tuple(tuple(Fraction(x) for x in row) for row in obj["q2"]))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="packbound",
        description="Exact constructions and certified numerics for the "
                    "sphere-packing bounds in dimensions 8 and 24.")
    parser.add_argument("--precision", type=int, default=60,
                        help="working precision in decimal digits")
    parser.add_argument("--trunc", type=int, default=300,
                        help="series truncation in grid units (eighths)")
    parser.add_argument("--budget", type=int, default=64,
                        help="enumeration budget (max squared norm)")
    parser.add_argument("--format", dest="fmt", default="text",
                        choices=("json", "csv", "text"))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("code", help="binary code constructions")
    p.add_argument("action", choices=("info",))
    p.add_argument("--name", required=True, choices=("hamming8", "golay24"))
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("lattice", help="lattice constructions")
    p.add_argument("action", choices=("info", "theta"))
    p.add_argument("--name", required=True,
                   choices=("e8", "l24", "leech", "zn"))
    p.add_argument("--n", type=int, help="dimension for zn")
    p.add_argument("--max-norm", dest="max_norm", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("qseries", help="named q-series")
    p.add_argument("action", choices=("show",))
    p.add_argument("name")
    p.add_argument("--terms", type=int, default=8)
    p.add_argument("--csv", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("magic", help="optimal test functions")
    p.add_argument("action", choices=("eval", "table", "check"))
    p.add_argument("--dim", type=int, required=True, choices=(8, 24))
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--rmax", type=float, default=4.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--report", choices=("json", "text"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("lpbound", help="linear-programming bound pipeline")
    p.add_argument("action", nargs="?", default="run",
                   choices=("run", "export-sdp"))
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--method", choices=("sampled", "forced", "newton"),
                   default="sampled")
    p.add_argument("-o", "--out")

    p = sub.add_parser("verify", help="verification pipelines")
    p.add_argument("target", choices=("magic", "poisson", "sos"))
    p.add_argument("--dim", type=int, default=8, choices=(8, 24))
    p.add_argument("--name", default="e8",
                   choices=("e8", "l24", "leech", "zn"))
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", default="1")
    p.add_argument("--cutoff", type=int, default=25)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--cert")
    p.add_argument("--out")
    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0,) else 0
    try:
        cfg = RunConfig(precision=args.precision, trunc=args.trunc,
                        budget=args.budget, fmt=args.fmt).validate()
    except ValueError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_USAGE
    handler = {
        "code": _cmd_code,
        "lattice": _cmd_lattice,
        "qseries": _cmd_qseries,
        "magic": _cmd_magic,
        "lpbound": _cmd_lpbound,
        "verify": _cmd_verify,
    }[args.command]
    return handler(args, cfg)


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
