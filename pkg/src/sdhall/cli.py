"""Command-line entry point ``sdhall``."""
from __future__ import annotations

import json
import os
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources

import click

from . import fqrep, hallengine as he, ncpresent as nc
from .exactscalar import ExactScalarError
from .quivercartan import (
    Quiver,
    QuiverError,
    cartan_matrix,
    euler_form,
    gkm_cartan,
    sym_euler_form,
)

BUILTIN_QUIVERS = ("jordan", "point", "a2", "kronecker", "loop2", "discrete2")
SUITES = (
    "eikfil", "commutation", "serre", "b-relations", "central-twist",
    "divided-power", "classical-bracket", "quantum-relations", "acyclic",
)


@dataclass
class RunConfig:
    """Resolved options of one invocation, echoed into reports."""

    command: str
    quiver: str = "jordan"
    q: list = field(default_factory=list)
    max_dim: int = fqrep.DEFAULT_MAX_DIM
    lmax: int = 3
    degree_bound: int | None = None
    samples: list = field(default_factory=list)
    serre_sign: str = "signed"
    threads: int = 1
    out: str | None = None
    format: str = "text"
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.max_dim < 1 or self.lmax < 1 or self.threads < 1:
            raise click.UsageError("caps and thread counts must be positive")
        for q in list(self.q) + list(self.samples):
            if q < 2:
                raise click.UsageError(f"field size {q} out of range")

    def apply_caps(self) -> None:
        fqrep.CAPS.max_dim = self.max_dim
        fqrep.CAPS.max_q = max([fqrep.DEFAULT_MAX_Q] + list(self.q) + list(self.samples))

    def echo(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v not in (None, {}, [])}


def load_quiver(spec: str) -> Quiver:
    """A built-in name or a JSON file with ``vertices`` and ``arrows``."""
    if os.path.exists(spec):
        return Quiver.load(spec)
    name = spec[:-5] if spec.endswith(".json") else spec
    name = os.path.basename(name)
    if name in BUILTIN_QUIVERS:
        text = resources.files("sdhall").joinpath("data", f"{name}.json").read_text(encoding="utf-8")
        return Quiver.from_json(text)
    raise QuiverError(f"no quiver file or built-in named {spec!r}")


def _int_list(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected a comma-separated integer list, got {text!r}") from exc


def _vertex(Q: Quiver, label: str) -> int:
    if label not in Q.index:
        raise click.BadParameter(f"unknown vertex {label!r}")
    return Q.index[label]


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


_ERRORS = (QuiverError, nc.PresentationError, nc.NCParseError, nc.ClassicalLimitError, he.HallError,
           fqrep.RepError, ExactScalarError, ValueError)


def _run(fn):
    try:
        return fn()
    except click.ClickException:
        raise
    except _ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def common(f):
    """Options shared by every subcommand."""
    opts = [
        click.option("--quiver", "quiver", default="jordan", show_default=True,
                     help="built-in name or JSON file"),
        click.option("--q", "q", default=None, help="comma-separated field sizes"),
        click.option("--max-dim", default=fqrep.DEFAULT_MAX_DIM, show_default=True, type=int),
        click.option("--lmax", default=3, show_default=True, type=int),
        click.option("--degree-bound", default=None, type=int),
        click.option("--samples", default=None, help="comma-separated field sizes for lifting"),
        click.option("--serre-sign", type=click.Choice(["signed", "unsigned", "both"]), default="signed",
                     show_default=True),
        click.option("--threads", default=1, show_default=True, type=int),
        click.option("--out", default=None, help="write output to this file"),
        click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def make_config(command, quiver, q, max_dim, lmax, degree_bound, samples, serre_sign, threads, out, fmt,
                default_q=(4,), **extra) -> RunConfig:
    cfg = RunConfig(command, quiver, _int_list(q) or list(default_q), max_dim, lmax, degree_bound,
                    _int_list(samples), serre_sign, threads, out, fmt, {k: v for k, v in extra.items() if v is not None})
    cfg.validate()
    cfg.apply_caps()
    return cfg


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Exact computations in twisted semi-derived Hall algebras of quivers."""


@main.command()
@common
def cartan(**kw):
    """Borcherds-Cartan matrix and index sets of a quiver."""
    cfg = make_config("cartan", **kw)

    def go():
        Q = load_quiver(cfg.quiver)
        C = cartan_matrix(Q, cfg.lmax)
        data = {
            "vertices": list(Q.vertices),
            "matrix": [list(r) for r in C.matrix],
            "real": [Q.vertices[i] for i in C.real_vertices],
            "imaginary": [Q.vertices[i] for i in C.imaginary_vertices],
            "index_set": [[Q.vertices[i], l] for i, l in C.index_set(cfg.lmax)],
        }
        if cfg.format == "json":
            _emit(cfg, json.dumps(data))
            return
        lines = [
            "matrix: " + json.dumps(data["matrix"]).replace(" ", ""),
            "real: {" + ", ".join(data["real"]) + "}",
            "imaginary: {" + ", ".join(data["imaginary"]) + "}",
            f"index set (l <= {cfg.lmax}): " + ", ".join(f"({v},{l})" for v, l in data["index_set"]),
        ]
        _emit(cfg, "\n".join(lines))

    _run(go)


@main.command()
@click.argument("alpha")
@click.argument("beta")
@common
def euler(alpha, beta, **kw):
    """Euler form <alpha, beta> and its symmetrization for vectors like 1,0."""
    cfg = make_config("euler", **kw)

    def go():
        Q = load_quiver(cfg.quiver)
        a, b = tuple(_int_list(alpha)), tuple(_int_list(beta))
        if len(a) != Q.n or len(b) != Q.n:
            raise click.BadParameter(f"vectors need {Q.n} entries")
        data = {"euler": euler_form(Q, a, b), "symmetric": sym_euler_form(Q, a, b)}
        _emit(cfg, json.dumps(data) if cfg.format == "json" else f"<a,b> = {data['euler']}\n(a,b) = {data['symmetric']}")

    _run(go)


def _presentation(Q: Quiver, variant: str, lmax: int, sign: str, charge: list[int]):
    C = cartan_matrix(Q, lmax)
    if variant == "gkm":
        if not charge:
            charge = [1 if C.is_real(i) else lmax for i in range(C.n)]
        return nc.gkm_presentation(gkm_cartan(C.labels, C.matrix, charge), serre_sign_variant=sign)
    ctor = nc.quantum_presentation if variant == "quantum" else nc.classical_presentation
    return ctor(C, serre_sign_variant=sign)


@main.command()
@click.argument("expr")
@click.option("--variant", type=click.Choice(["quantum", "classical", "gkm"]), default="quantum", show_default=True)
@click.option("--charge", default=None, help="charge vector for the gkm variant")
@click.option("--classical-limit", "limit", is_flag=True, help="also take the value at t = -1")
@common
def straighten(expr, variant, charge, limit, **kw):
    """Normal form of a polynomial in e(i,l), f(i,l), K(i), Kinv(i), h(i)."""
    cfg = make_config("straighten", **kw)

    def go():
        Q = load_quiver(cfg.quiver)
        sign = "signed" if cfg.serre_sign == "both" else cfg.serre_sign
        P = _presentation(Q, variant, cfg.lmax, sign, _int_list(charge))
        p = nc.parse_ncpoly(expr)
        out = nc.straighten(p, P)
        text = str(out)
        if limit:
            text += "\nlimit: " + str(nc.classical_limit(p, P))
        _emit(cfg, json.dumps({"normal_form": str(out)}) if cfg.format == "json" else text)

    _run(go)


@main.command()
@click.option("--i", "i", required=True, help="vertex i")
@click.option("--j", "j", required=True, help="vertex j")
@click.option("--l", "l", default=1, show_default=True, type=int)
@click.option("--side", type=click.Choice(["E", "F"]), default="E", show_default=True)
@common
def serre(i, j, l, side, **kw):
    """The Serre sum for (i, (j, l)) in one or both sign variants."""
    cfg = make_config("serre", **kw)

    def go():
        Q = load_quiver(cfg.quiver)
        P = nc.quantum_presentation(cartan_matrix(Q, max(cfg.lmax, l)))
        variants = ("signed", "unsigned") if cfg.serre_sign == "both" else (cfg.serre_sign,)
        data = {v: str(nc.serre_sum(P, side, _vertex(Q, i), _vertex(Q, j), l, v)) for v in variants}
        if cfg.format == "json":
            _emit(cfg, json.dumps(data))
        else:
            _emit(cfg, "\n".join(f"{v}: {s}" for v, s in data.items()))

    _run(go)


@main.command()
@click.argument("expr")
@click.option("--reduce/--raw", "reduced", default=True, show_default=True,
              help="reduced product and basis, or raw Hall product on classes")
@common
def hall(expr, reduced, **kw):
    """Evaluate a Hall expression such as "C(S1)*Cs(S1)" at each --q."""
    cfg = make_config("hall", **kw)

    def go():
        Q = load_quiver(cfg.quiver)
        results = {q: he.parse_hall(expr, Q, q, reduced) for q in cfg.q}
        if cfg.format == "json":
            _emit(cfg, json.dumps({str(q): r.to_dict() for q, r in results.items()}))
        elif len(results) == 1:
            _emit(cfg, str(next(iter(results.values()))))
        else:
            _emit(cfg, "\n".join(f"q={q}: {r}" for q, r in results.items()))

    _run(go)


@main.command()
@click.argument("expr")
@click.option("--mode", type=click.Choice(["auto", "q", "v"]), default="auto", show_default=True)
@click.option("--symbolic-only", is_flag=True, help="print the lifted element without its limit")
@common
def limit(expr, mode, symbolic_only, **kw):
    """Lift a reduced Hall expression over --samples and evaluate at t = -1."""
    cfg = make_config("limit", **kw)

    def go():
        Q = load_quiver(cfg.quiver)
        samples = cfg.samples or [4, 9, 25]
        fqrep.CAPS.max_q = max(fqrep.CAPS.max_q, max(samples))
        sym = he.lift_symbolic(lambda q: he.parse_hall(expr, Q, q, True), samples, cfg.degree_bound, mode)
        if symbolic_only:
            _emit(cfg, str(sym))
            return
        lim = he.classical_limit_hall(sym)
        if cfg.format == "json":
            _emit(cfg, json.dumps({"lift": str(sym), "limit": str(lim)}))
        else:
            _emit(cfg, str(lim))

    _run(go)


@main.command()
@common
def catalog(**kw):
    """Enumerate module classes up to --max-dim and print the class table."""
    cfg = make_config("catalog", **kw)

    def go():
        Q = load_quiver(cfg.quiver)
        tables = {}
        for q in cfg.q:
            for d in fqrep.dimension_vectors_up_to(Q, cfg.max_dim):
                fqrep.module_classes(Q, d, q)
            tables[q] = fqrep.get_catalog(Q, q).export()
        if cfg.format == "json":
            _emit(cfg, json.dumps({"config": cfg.echo(), "catalogs": {str(q): t for q, t in tables.items()}}))
            return
        lines = [f"# config {json.dumps(cfg.echo(), sort_keys=True)}"]
        for q, rows in tables.items():
            lines.append(f"q = {q}")
            lines.append("id\tlabel\tdims1\tdims0\torbit\taut\th0\th1\tkrull-schmidt")
            for r in rows:
                lines.append("\t".join(str(x) for x in (
                    r["id"], r["label"], r["dims1"], r["dims0"], r["orbit_size"], r["aut"], r["h0"], r["h1"],
                    "+".join(r["krull_schmidt"]) or "0")))
        _emit(cfg, "\n".join(lines))

    _run(go)


@main.command()
@click.argument("suite", type=click.Choice(SUITES + ("all",)))
@click.option("--i", "i", default=None, help="vertex i (default: first vertex)")
@click.option("--j", "j", default=None, help="vertex j (default: second vertex)")
@click.option("--k", "k", default=None, type=int)
@click.option("--l", "l", default=None, type=int)
@common
def verify(suite, i, j, k, l, **kw):
    """Run a verification suite; exit status 1 if any case fails."""
    cfg = make_config("verify", default_q=(4,), suite=suite, i=i, j=j, k=k, l=l, **kw)

    def go():
        Q = load_quiver(cfg.quiver)
        names = list(SUITES) if suite == "all" else [suite]
        report = he.VerificationReport(suite, he.quiver_name(Q), sorted(cfg.q))
        for name in names:
            report.merge(run_suite(name, Q, cfg, i, j, k, l))
        report.sorted()
        payload = report.to_dict()
        payload["config"] = cfg.echo()
        if cfg.format == "json":
            text = json.dumps(payload, indent=2)
        else:
            text = f"# config {json.dumps(cfg.echo(), sort_keys=True)}\n" + report.to_text()
        _emit(cfg, text)
        return report

    report = _run(go)
    sys.exit(0 if report.ok and report.summary[he.SKIP] == 0 else 1)


def _pairs(k, l, total):
    if k is not None and l is not None:
        return [(k, l)]
    return [(a, b) for a in range(1, total) for b in range(1, total) if a + b <= total and
            (k is None or a == k) and (l is None or b == l)]


def run_suite(name: str, Q: Quiver, cfg: RunConfig, i, j, k, l) -> he.VerificationReport:
    """Dispatch one suite; cases over (parameters, q) run on the worker pool."""
    vi = _vertex(Q, i) if i else 0
    vj = _vertex(Q, j) if j else (1 if Q.n > 1 else 0)
    jobs = []
    if name in ("eikfil", "commutation"):
        fn = he.verify_eikfil if name == "eikfil" else he.verify_commutation
        for a, b in _pairs(k, l, 3 if name == "eikfil" else 4):
            if name == "commutation" and (a > 2 or b > 2) and (k is None or l is None):
                continue
            for q in cfg.q:
                jobs.append(lambda a=a, b=b, q=q: fn(Q, vi, a, b, q))
    elif name == "serre":
        variants = ("signed", "unsigned") if cfg.serre_sign == "both" else (cfg.serre_sign,)
        for v in variants:
            for q in cfg.q:
                jobs.append(lambda v=v, q=q: he.verify_serre(Q, vi, vj, l or 1, q, v))
    elif name == "b-relations":
        for q in cfg.q:
            jobs.append(lambda q=q: he.verify_b_relations(Q, q))
    elif name == "central-twist":
        for q in cfg.q:
            def job(q=q):
                A = fqrep.simple_rep(Q, q, vi, k or 1)
                mods = he.default_b_modules(Q, q)
                targets = [fqrep.C(M) for M in mods] + [fqrep.Cs(M) for M in mods]
                r = he.verify_central_twist(Q, fqrep.K(A), targets, q)
                return r.merge(he.verify_central_twist(Q, fqrep.Ks(A), targets, q))
            jobs.append(job)
    elif name == "divided-power":
        samples = cfg.samples or [4, 9, 25, 49]
        for kk in ([k] if k else [2, 3]):
            jobs.append(lambda kk=kk: he.verify_divided_power(
                Q, lambda q: fqrep.simple_rep(Q, q, vi), kk, samples, cfg.degree_bound))
    elif name == "classical-bracket":
        samples = cfg.samples or [4, 9, 25]
        jobs.append(lambda: he.verify_classical_bracket(Q, vi, samples, cfg.degree_bound))
    elif name == "quantum-relations":
        for q in cfg.q:
            jobs.append(lambda q=q: he.verify_quantum_relations(
                Q, q, min(cfg.lmax, 2), sign_variant="signed" if cfg.serre_sign == "both" else cfg.serre_sign))
    elif name == "acyclic":
        if not Q.is_acyclic():
            r = he.VerificationReport("acyclic", he.quiver_name(Q), cfg.q)
            r.skip("acyclic", "quiver has oriented cycles")
            return r
        for q in cfg.q:
            jobs.append(lambda q=q: he.verify_quantum_relations(Q, q, 1, variant=he.ACYCLIC))
    fqrep.CAPS.max_q = max(fqrep.CAPS.max_q, *(cfg.samples or [0]), 49 if name == "divided-power" else 0)
    reports = he._run_cases(jobs, cfg.threads)
    out = he.VerificationReport(name, he.quiver_name(Q), sorted(cfg.q))
    for r in reports:
        out.merge(r)
    return out.sorted()


if __name__ == "__main__":  # pragma: no cover
    main()
