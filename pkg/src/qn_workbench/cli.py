"""qn-workbench command line.

Exit codes: 0 pass, 1 usage error, 2 verification failure, 3 insufficient
truncation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass

from . import family
from .groebner import RewriteSystem, TruncationError, complete, load_system, save_system
from .linalg import QQ, parse_field
from .resolution import (build_paper_complex, check_d_squared, complex_homology,
                         koszulity_verdict)
from .series import (QuadraticPresentation, dual_polynomial_check, froberg_check,
                     hilbert_series, qn_presentation, quadratic_dual)
from .verify import run_all

EXIT_PASS, EXIT_USAGE, EXIT_FAIL, EXIT_TRUNCATION = 0, 1, 2, 3
CACHE_ENV = "QN_WORKBENCH_CACHE"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    n: int | None
    algebra: str
    max_degree: int
    field: str
    i_max: int
    j_max: int
    format: str
    cache_dir: str
    jobs: int
    presentation: str | None = None

    def validate(self):
        if self.presentation is None and (self.n is None or self.n < 1):
            raise UsageError("--n must be at least 1")
        if self.max_degree < 2:
            raise UsageError("--max-degree must be at least 2")
        try:
            parse_field(self.field)
        except ValueError as e:
            raise UsageError(str(e)) from None


def _presentation(cfg: RunConfig, field) -> QuadraticPresentation:
    if cfg.presentation:
        with open(cfg.presentation, encoding="utf-8") as fh:
            return QuadraticPresentation.parse(fh.read(), field, os.path.basename(cfg.presentation))
    return qn_presentation(cfg.n, cfg.algebra, field)


def _cached_gb(cfg: RunConfig, pres: QuadraticPresentation, field) -> RewriteSystem:
    if cfg.presentation or not cfg.cache_dir:
        return complete(list(pres.relations), cfg.max_degree, field)
    name = f"{cfg.algebra}{cfg.n}_d{cfg.max_degree}_{field.name.replace(':', '')}.gb"
    path = os.path.join(cfg.cache_dir, name)
    if os.path.exists(path):
        rs, _, _ = load_system(path)
        return rs
    rs = complete(list(pres.relations), cfg.max_degree, field)
    save_system(rs, path, pres.alphabet, {"n": cfg.n, "algebra": cfg.algebra})
    return rs


def cmd_gb(cfg: RunConfig, field):
    pres = _presentation(cfg, field)
    rs = _cached_gb(cfg, pres, field)
    alph = pres.alphabet
    data = {"rules": [alph.render(r) for r in rs.rules], "count": len(rs)}
    lines = [f"Groebner basis of {pres.name} to degree {cfg.max_degree}: {len(rs)} elements"]
    lines += ["  " + s for s in data["rules"]]
    verdict = "COMPUTED"
    if cfg.algebra == "gr" and not cfg.presentation and cfg.n >= 2:
        closed = [p for p in family.closed_gb(cfg.n, field) if p.degree() <= cfg.max_degree]
        data["closed_form"] = [alph.render(p) for p in closed]
        verdict = "PASS" if set(closed) == set(rs.rules) else "FAIL"
        lines.append(f"closed form g^t_(A,B): {len(closed)} elements -> {verdict}")
    return verdict, data, lines


def cmd_hilbert(cfg: RunConfig, field):
    pres = _presentation(cfg, field)
    h = hilbert_series(pres, cfg.max_degree, field)
    data = {"series": h.to_json()}
    lines = [f"H_{pres.name}(t) = {h.render()}"]
    verdict = "COMPUTED"
    if not cfg.presentation and cfg.n >= 2:
        other = qn_presentation(cfg.n, "gr" if cfg.algebra == "q" else "q", field)
        h2 = hilbert_series(other, cfg.max_degree, field)
        data["filtration_partner"] = h2.to_json()
        verdict = "PASS" if h == h2 else "FAIL"
        lines.append(f"H_{other.name}(t) = {h2.render()}  [{verdict}]")
    return verdict, data, lines


def cmd_dual(cfg: RunConfig, field):
    pres = _presentation(cfg, field)
    dual = quadratic_dual(pres)
    hd = hilbert_series(dual, cfg.max_degree, field)
    data = {"n_relations": len(dual.relations), "dual_series": hd.to_json(),
            "relations": [dual.alphabet.render(r) for r in dual.relations]}
    lines = [f"{dual.name}: {dual.n_gens} generators, {len(dual.relations)} relations",
             f"H(t) = {hd.render()}"]
    verdict = "COMPUTED"
    if not cfg.presentation and cfg.max_degree >= cfg.n + 2:
        rep = dual_polynomial_check(cfg.n, cfg.max_degree, cfg.algebra, field)
        verdict = "PASS" if rep["passed"] else "FAIL"
        data["global_dimension_check"] = rep
        lines.append(f"dual series is a polynomial of degree {cfg.n}: {verdict}")
    return verdict, data, lines


def cmd_froberg(cfg: RunConfig, field):
    pres = _presentation(cfg, field)
    h = hilbert_series(pres, cfg.max_degree, field)
    hd = hilbert_series(quadratic_dual(pres), cfg.max_degree, field)
    res = froberg_check(h, hd, cfg.max_degree)
    lines = [f"H(t)  = {h.render()}", f"H!(t) = {hd.render()}",
             "degree  sum_j (-1)^j H[d-j] H![j]"]
    lines += [f"{d:>6}  {v}" for d, v in enumerate(res.table)]
    verdict = "PASS" if res.ok else "FAIL"
    if not res.ok:
        lines.append(f"first failing degree: {res.first_failure}")
    data = {"series": h.to_json(), "dual_series": hd.to_json(), **res.to_json()}
    return verdict, data, lines


def cmd_complex(cfg: RunConfig, field):
    if cfg.presentation:
        raise UsageError("complex works on --n only")
    c = build_paper_complex(cfg.n)
    pres = qn_presentation(cfg.n, "gr", field)
    gb = _cached_gb(cfg, pres, field) if cfg.n >= 2 else RewriteSystem(max_degree=cfg.max_degree, field=field)
    dd = check_d_squared(c, gb)
    hom = complex_homology(c, gb, cfg.max_degree, jobs=cfg.jobs)
    lines = [f"K^{cfg.n} generators per degree: {c.ranks()}",
             f"d^2 = 0: {'PASS' if dd.ok else 'FAIL'} ({dd.checked} entries)"]
    for g, tgt, r in dd.witnesses[:10]:
        lines.append(f"  residue at {g.label} -> {tgt.label if tgt else 'K_0'}: {c.alphabet.render(r)}")
    lines.append("homology dims (rows t, columns internal degree):")
    for t in range(c.top + 1):
        lines.append(f"  H_{t}: " + " ".join(str(hom.homology[t, d]) for d in range(cfg.max_degree + 1)))
    verdict = "PASS" if dd.ok and hom.acyclic else "FAIL"
    data = {"ranks": c.ranks(), "d_squared_ok": dd.ok,
            "witnesses": [[g.label, t.label if t else "K_0", c.alphabet.render(r)] for g, t, r in dd.witnesses],
            **hom.to_json()}
    return verdict, data, lines


def cmd_tor(cfg: RunConfig, field):
    pres = _presentation(cfg, field)
    rep = koszulity_verdict(pres, cfg.i_max, cfg.j_max, field)
    from .resolution import TorTable
    table = TorTable(cfg.i_max, cfg.j_max, {(e["i"], e["j"]): e["dim"] for e in rep["tor"]})
    lines = [f"Tor_(i,j) of {pres.name} for i <= {cfg.i_max}, j <= {cfg.j_max}:", table.render(),
             f"diagonal {rep['diagonal']}; off-diagonal nonzero: {len(rep['off_diagonal'])}",
             f"Koszul to bound: {rep['verdict']}"]
    return rep["verdict"], rep, lines


def cmd_export(cfg: RunConfig, field, output=None):
    pres = _presentation(cfg, field)
    text = pres.render()
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return "COMPUTED", {"presentation": text, "path": output}, ([] if output else text.rstrip("\n").split("\n"))


def cmd_verify_all(cfg: RunConfig, field):
    if cfg.n < 2:
        raise UsageError("verify-all needs --n >= 2")
    results = run_all(cfg.n, field)
    lines = [r.line() for r in results]
    verdict = "PASS" if all(r.passed for r in results) else "FAIL"
    return verdict, {"criteria": [r.to_json() for r in results]}, lines


COMMANDS = {
    "gb": cmd_gb, "hilbert": cmd_hilbert, "dual": cmd_dual, "froberg": cmd_froberg,
    "complex": cmd_complex, "tor": cmd_tor, "export": cmd_export, "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None)
    common.add_argument("--algebra", choices=["q", "gr"], default="gr")
    common.add_argument("--max-degree", type=int, default=5)
    common.add_argument("--i-max", type=int, default=4)
    common.add_argument("--j-max", type=int, default=6)
    common.add_argument("--field", default="rational", help="rational or fp:P")
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV, ""),
                        help=f"directory for cached Groebner bases (default ${CACHE_ENV})")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--presentation", default=None,
                        help="presentation file to use instead of --n/--algebra")
    parser = _Parser(prog="qn-workbench", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "export":
            p.add_argument("--output", "-o", default=None)
        if name == "complex":
            p.add_argument("--dump", default=None, help="write the complex as text")
    return parser


def _emit(cfg, verdict, data, lines, elapsed_ms, out):
    if cfg.format == "json":
        report = {"command": cfg.command, "config": asdict(cfg), "verdict": verdict,
                  "data": data, "elapsed_ms": elapsed_ms}
        out.write(json.dumps(report, indent=2, default=str) + "\n")
    else:
        for ln in lines:
            out.write(ln + "\n")
        out.write(f"verdict: {verdict} ({elapsed_ms} ms)\n")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.command, args.n, args.algebra, args.max_degree, args.field,
                    args.i_max, args.j_max, args.format, args.cache_dir, args.jobs,
                    args.presentation)
    start = time.perf_counter()
    try:
        cfg.validate()
        field = parse_field(cfg.field)
        if cfg.command == "export":
            verdict, data, lines = cmd_export(cfg, field, args.output)
        else:
            verdict, data, lines = COMMANDS[cfg.command](cfg, field)
            if cfg.command == "complex" and args.dump:
                with open(args.dump, "w", encoding="utf-8") as fh:
                    fh.write(build_paper_complex(cfg.n).dump())
    except UsageError as e:
        sys.stderr.write(f"qn-workbench: {e}\n")
        return EXIT_USAGE
    except TruncationError as e:
        sys.stderr.write(f"qn-workbench: insufficient truncation: {e}\n")
        return EXIT_TRUNCATION
    except (OSError, ValueError) as e:
        sys.stderr.write(f"qn-workbench: {e}\n")
        return EXIT_USAGE
    elapsed_ms = int((time.perf_counter() - start) * 1000)
    _emit(cfg, verdict, data, lines, elapsed_ms, out)
    return EXIT_FAIL if verdict == "FAIL" else EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
