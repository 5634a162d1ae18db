"""Command line front end: system files, the analysis pipeline and reports.

A system file is line oriented; ``#`` starts a comment.

    name   wave
    indep  x t
    dep    u v w
    param  a b            # optional symbolic constants
    order  1              # default 1
    eq     u_x = w        # solved form, one principal derivative per line
    impl   u_x^2 + u^2    # or implicit equations Phi = 0 (not both forms)
    point  x=0 u=1/2      # optional evaluation point

Exit codes: 0 when the system is involutive and the family is built (for an
implicit system: Cartan's test passes), 1 when the analysis completes but the
construction fails, 2 on input errors.
"""

import argparse
import json
import re
import sys as _sys
from dataclasses import dataclass, field, asdict
from fractions import Fraction

from .expr import Expr, ExprError
from .exprparse import ParseError, parse_expr, parse_jet_name
from .jet import Chart, order
from .system import ReducedCNF, ImplicitSystem, validate
from .symbol import symbol_matrix, cartan_test
from .involution import monster
from .vessiot import (vessiot_basis, structure_coefficients, verify_structure_equations,
                      implicit_vessiot_generators)
from .connection import build_family, reduce_differential_conditions, pointwise_check


# --------------------------------------------------------------------------
# input

@dataclass
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self):
        return "%d:%d: %s" % (self.line, self.col, self.message)


class InputError(Exception):
    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass
class SystemFile:
    name: str = ""
    indep: list = field(default_factory=list)
    dep: list = field(default_factory=list)
    params: list = field(default_factory=list)
    order: int = 1
    eqs: list = field(default_factory=list)       # (line, col, lhs, rhs text)
    impl: list = field(default_factory=list)      # (line, col, text)
    point: list = field(default_factory=list)     # (line, col, name, value text)

    @property
    def implicit(self):
        return bool(self.impl)


_DIRECTIVES = ("name", "indep", "dep", "param", "order", "eq", "impl", "point")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9]*$")


def parse(text):
    """SystemFile from file text; raises InputError with positioned diagnostics."""
    sf = SystemFile()
    diags = []
    seen = set()
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        parts = line.strip().split(None, 1)
        key = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        rest_col = line.index(rest, col0 - 1 + len(key)) + 1 if rest else col0 + len(key)
        if key not in _DIRECTIVES:
            diags.append(Diagnostic(ln, col0, "unknown directive %r" % key))
            continue
        if key in ("name", "indep", "dep", "param", "order") and key in seen:
            diags.append(Diagnostic(ln, col0, "duplicate %r line" % key))
            continue
        seen.add(key)
        if key == "name":
            sf.name = rest.strip()
        elif key in ("indep", "dep", "param"):
            names = rest.split()
            for nm in names:
                if not _IDENT.match(nm):
                    diags.append(Diagnostic(ln, rest_col + rest.index(nm), "invalid name %r" % nm))
            {"indep": sf.indep, "dep": sf.dep, "param": sf.params}[key].extend(names)
        elif key == "order":
            try:
                sf.order = int(rest)
                if sf.order < 1:
                    raise ValueError
            except ValueError:
                diags.append(Diagnostic(ln, rest_col, "order must be a positive integer"))
        elif key == "eq":
            if "=" not in rest:
                diags.append(Diagnostic(ln, rest_col, "expected '<jet> = <expression>'"))
                continue
            lhs, rhs = rest.split("=", 1)
            rcol = rest_col + len(lhs) + 1
            rcol += len(rhs) - len(rhs.lstrip())
            sf.eqs.append((ln, rest_col, lhs.strip(), rhs.strip(), rcol))
        elif key == "impl":
            if not rest.strip():
                diags.append(Diagnostic(ln, rest_col, "empty equation"))
                continue
            sf.impl.append((ln, rest_col, rest))
        elif key == "point":
            for m in re.finditer(r"([A-Za-z][A-Za-z0-9_]*)\s*=\s*([-+]?\d+(?:/\d+)?)", rest):
                sf.point.append((ln, rest_col + m.start(), m.group(1), m.group(2)))
            if not sf.point:
                diags.append(Diagnostic(ln, rest_col, "expected name=value pairs"))
    if not sf.indep:
        diags.append(Diagnostic(1, 1, "missing 'indep' line"))
    if not sf.dep:
        diags.append(Diagnostic(1, 1, "missing 'dep' line"))
    if sf.eqs and sf.impl:
        diags.append(Diagnostic(sf.impl[0][0], 1, "'eq' and 'impl' lines cannot be mixed"))
    if not sf.eqs and not sf.impl:
        diags.append(Diagnostic(1, 1, "no equations"))
    clash = set(sf.indep) & set(sf.dep) | set(sf.params) & (set(sf.indep) | set(sf.dep))
    if clash:
        diags.append(Diagnostic(1, 1, "names used twice: %s" % ", ".join(sorted(clash))))
    if diags:
        raise InputError(diags)
    return sf


def build(sf):
    """ReducedCNF or ImplicitSystem from a parsed file."""
    chart = Chart(sf.indep, sf.dep, sf.order, sf.params)
    diags = []
    if sf.implicit:
        eqs = []
        for ln, col, text in sf.impl:
            try:
                eqs.append(parse_expr(text, chart, ln, col, max_order=sf.order))
            except ParseError as e:
                diags.append(Diagnostic(e.line, e.col, e.message))
        if diags:
            raise InputError(diags)
        return ImplicitSystem(chart, eqs, sf.name)
    eqs = {}
    for ln, col, lhs, rhs, rcol in sf.eqs:
        try:
            alpha, mu = parse_jet_name(chart, lhs, ln, col)
            if order(mu) != sf.order:
                raise ParseError("left side %s has order %d, expected %d" % (lhs, order(mu), sf.order),
                                 ln, col)
            if (alpha, mu) in eqs:
                raise ParseError("second equation for %s" % lhs, ln, col)
            eqs[(alpha, mu)] = parse_expr(rhs, chart, ln, rcol, max_order=sf.order)
        except ParseError as e:
            diags.append(Diagnostic(e.line, e.col, e.message))
    if diags:
        raise InputError(diags)
    return ReducedCNF(chart, eqs, sf.name)


def evaluation_point(sf, sys):
    if not sf.point:
        return None
    from .exprparse import resolve_identifier
    pt = {}
    diags = []
    for ln, col, name, val in sf.point:
        try:
            pt[resolve_identifier(sys.chart, name, ln, col)] = Fraction(val)
        except ParseError as e:
            diags.append(Diagnostic(e.line, e.col, e.message))
    if diags:
        raise InputError(diags)
    return pt


# --------------------------------------------------------------------------
# analysis

@dataclass
class AnalysisConfig:
    contract: bool = True
    step: int = None
    seed: int = 0


@dataclass
class Report:
    sections: dict
    exit_code: int = 0

    def to_json(self):
        return json.dumps(asdict(self), indent=2)

    @staticmethod
    def from_json(text):
        d = json.loads(text)
        return Report(d["sections"], d["exit_code"])

    def to_text(self):
        return render_text(self)


def _system_section(sf, sys, violations):
    ch = sys.chart
    if isinstance(sys, ReducedCNF):
        eqs = ["%s = %s" % (ch.jet_name(a, mu), sys.eqs[(a, mu)]) for a, mu in sys.principal_pairs()]
    else:
        eqs = ["%s = 0" % e for e in sys.equations]
    return {
        "name": sf.name,
        "form": "implicit" if sf.implicit else "solved",
        "indep": list(ch.indep),
        "dep": list(ch.dep),
        "params": list(ch.params),
        "order": sys.q,
        "equations": eqs,
        "violations": [v.to_dict() for v in violations],
    }


def analyze(sf, cfg=None):
    """Run symbol -> involution -> vessiot -> connection; returns a Report.
    Raises InputError for files that do not describe a valid system."""
    cfg = cfg or AnalysisConfig()
    sys = build(sf)
    pt = evaluation_point(sf, sys)
    violations = validate(sys) if isinstance(sys, ReducedCNF) else []
    sections = {"system": _system_section(sf, sys, violations)}
    if violations:
        where = {lhs.replace(" ", ""): (ln, col) for ln, col, lhs, _, _ in sf.eqs}
        diags = []
        for v in violations:
            ln, col = where.get(v.equation, (0, 0))
            if not ln:
                # jet names are canonical; match the file's spelling by parsing it
                for l2, c2, lhs, _, _ in sf.eqs:
                    if sys.chart.jet_name(*parse_jet_name(sys.chart, lhs)) == v.equation:
                        ln, col = l2, c2
            diags.append(Diagnostic(ln, col, "%s: %s" % (v.equation, v.message)))
        raise InputError(diags)

    sd = symbol_matrix(sys, seed=cfg.seed)
    ct = cartan_test(sys, seed=cfg.seed)
    sym = {"matrix": sd.to_dict(), "cartan_test": ct.to_dict()}
    if isinstance(sys, ReducedCNF):
        sym["cartan_characters"] = list(sys.alphas())
    sections["symbol"] = sym

    if isinstance(sys, ImplicitSystem):
        sections["involution"] = {"applicable": False, "reason": "implicit system"}
        gens = implicit_vessiot_generators(sys, seed=cfg.seed)
        ves = gens.to_dict()
        ves["assumption"] = "R_q^(1) = R_q is assumed, not checked; the generators are pointwise"
        if pt is not None:
            ves["at_point"] = {
                "on_equation": all(e.eval_at(pt) == 0 for e in sys.equations),
                "generators": [{c.name: str(V[c].eval_at(pt)) for c in V.support()} for V in gens.fields],
            }
        sections["vessiot"] = ves
        sections["connection"] = {"applicable": False, "reason": "implicit systems stop after the generators"}
        return Report(sections, 0 if ct.passes else 1)

    sections["involution"] = monster(sys).to_dict()
    sc = structure_coefficients(sys)
    check = verify_structure_equations(sys)
    ves = {"basis": vessiot_basis(sys).to_dict(), "structure": sc.to_dict(),
           "structure_equations_verified": check.ok}
    sections["vessiot"] = ves

    fam = build_family(sys, cfg.contract, stop=cfg.step, seed=cfg.seed)
    con = fam.to_dict()
    if fam.success and cfg.step is None:
        sym_fam = build_family(sys, True, seed=cfg.seed, homogeneous=True) if cfg.contract else fam
        con["symbol_steps_pass"] = bool(sym_fam.success)
        con["differential_conditions"] = reduce_differential_conditions(fam).to_dict()
        if pt is not None:
            choice = {v: Expr.const(0) for v in fam.free}
            con["at_point"] = pointwise_check(fam, choice, _complete_point(sys, pt)).to_dict()
    elif not fam.success:
        sym_fam = build_family(sys, True, seed=cfg.seed, homogeneous=True) if cfg.contract else fam
        con["symbol_steps_pass"] = bool(sym_fam.success)
    sections["connection"] = con
    return Report(sections, 0 if fam.success else 1)


def _complete_point(sys, pt):
    """Coordinates of the barred chart missing from pt are set to 0."""
    return {c: pt.get(c, Fraction(0)) for c in sys.barred_chart().coords} | {
        v: val for v, val in pt.items() if v.kind == "p"}


# --------------------------------------------------------------------------
# text form

def render_text(rep):
    s = rep.sections
    out = []
    sy = s["system"]
    out.append("system %s (%s, order %d) in %s; unknowns %s" % (
        sy["name"] or "<unnamed>", sy["form"], sy["order"], ", ".join(sy["indep"]), ", ".join(sy["dep"])))
    for e in sy["equations"]:
        out.append("  " + e)
    if "symbol" in s:
        m = s["symbol"]["matrix"]
        ct = s["symbol"]["cartan_test"]
        out.append("symbol: rank %d, betas %s, dim N = %d" % (m["rank"], m["betas"], m["dim_N"]))
        out.append("Cartan test: %s (rank M_{q+1} = %d, weighted sum %d)" % (
            "passes" if ct["passes"] else "fails", ct["rank_Mq1"], ct["weighted_sum"]))
        if "note" in ct:
            out.append("  " + ct["note"])
    inv = s.get("involution", {})
    if inv.get("applicable"):
        out.append("obstructions: symbol involutive %s, equation involutive %s" % (
            inv["symbol_involutive"], inv["equation_involutive"]))
    ves = s.get("vessiot", {})
    if "basis" in ves:
        for k, X in enumerate(ves["basis"]["X"], 1):
            out.append("X%d = %s" % (k, _field_text(X)))
        out.append("Y = d_{%s}" % ", ".join(ves["basis"]["Y"]) if ves["basis"]["Y"] else "Y: none")
    elif "generators" in ves:
        for k, V in enumerate(ves["generators"], 1):
            out.append("generator %d = %s" % (k, _field_text(V)))
    con = s.get("connection", {})
    for st in con.get("steps", []):
        rc, ac = st["rank_condition"], st["augmented_condition"]
        out.append("step %d: rank %d vs %d, augmented %d vs %d: %s" % (
            st["j"], rc["lhs_rank"], rc["rhs_rank"], ac["lhs_rank"], ac["rhs_rank"],
            "ok" if st["passes"] else "FAILS"))
        for rel in st.get("parameter_relations", []):
            out.append("  relation %s  labels %s" % (rel["relation"], ", ".join(rel["labels"])))
        for r in st.get("residuals", []):
            out.append("  residual %s" % r)
    if con.get("success"):
        out.append("family built: %d free parameters (%s)" % (
            len(con["free_parameters"]), ", ".join(con["free_parameters"])))
    out.append("exit code %d" % rep.exit_code)
    return "\n".join(out) + "\n"


def _field_text(d):
    parts = []
    for c, v in d.items():
        parts.append("d_%s" % c if v == "1" else "(%s)*d_%s" % (v, c))
    return " + ".join(parts) if parts else "0"


# --------------------------------------------------------------------------
# entry point

def main(argv=None):
    ap = argparse.ArgumentParser(prog="jetvessiot", description="Involution analysis of PDE systems")
    ap.add_argument("file", help="system file ('-' for stdin)")
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    ap.add_argument("--step", type=int, default=None, help="stop after step J")
    ap.add_argument("--no-contract", action="store_true", help="treat every zeta as its own unknown")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    try:
        text = _sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    except OSError as e:
        print("error: %s" % e, file=_sys.stderr)
        return 2
    try:
        rep = analyze(parse(text), AnalysisConfig(not args.no_contract, args.step, args.seed))
    except InputError as e:
        for d in e.diagnostics:
            print("%s:%s" % (args.file, d), file=_sys.stderr)
        return 2
    except (ExprError, ValueError) as e:
        print("%s: error: %s" % (args.file, e), file=_sys.stderr)
        return 2
    print(rep.to_json() if args.fmt != "text" else rep.to_text(), end="" if args.fmt == "text" else "\n")
    return rep.exit_code


if __name__ == "__main__":
    _sys.exit(main())
