"""Command-line interface and the fixture-reproduction driver.

Subcommands: witt, dieudonne, algebra, ext, module, steenrod, repro.  Every
JSON output is wrapped as {"manifest": ..., "result": ...}, schema-validated,
and rendered deterministically (sorted keys), so `repro all` can diff
regenerated fixtures byte-for-byte against the committed ones.

Exit codes: 0 success, 1 fixture mismatch, 2 usage/parse error, 3 a
feasibility guard was exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__, dieudonne, homology, linalg, steenrod, superalg, witt
from .dieudonne import GuardExceeded

PKG_ROOT = Path(__file__).resolve().parents[2]
SCHEMA_DIR = PKG_ROOT / "docs" / "schemas"
FIXTURE_DIR = PKG_ROOT / "fixtures"


# ---------------------------------------------------------------------------
# output plumbing


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _digest(result) -> str:
    return hashlib.sha256(_dump(result).encode()).hexdigest()


def make_output(argv: list[str], result, field: linalg.FieldSpec | None = None) -> dict:
    manifest = {
        "command": list(argv),
        "tool_version": __version__,
        "field": None if field is None else field.to_json(),
        "seed": None,
        "digest": _digest(result),
    }
    return {"manifest": manifest, "result": result}


_validators: dict[str, object] = {}


def _validator_for(schema_name: str):
    v = _validators.get(schema_name)
    if v is None:
        import jsonschema
        from referencing import Registry, Resource

        resources = []
        for path in SCHEMA_DIR.glob("*.schema.json"):
            resources.append((path.name, Resource.from_contents(json.loads(path.read_text()))))
        registry = Registry().with_resources(resources)
        schema = json.loads((SCHEMA_DIR / schema_name).read_text())
        v = jsonschema.Draft202012Validator(schema, registry=registry)
        _validators[schema_name] = v
    return v


def _validate_output(obj):
    if (SCHEMA_DIR / "run.schema.json").exists():
        _validator_for("run.schema.json").validate(obj)


def emit(args, argv, result, field=None, text: str | None = None) -> None:
    """Write the result as JSON (default) or as the plain-text rendering."""
    as_json = getattr(args, "json", False) or not text
    if as_json:
        obj = make_output(argv, result, field)
        _validate_output(obj)
        payload = _dump(obj)
    else:
        payload = text if text.endswith("\n") else text + "\n"
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(payload)
    else:
        sys.stdout.write(payload)


# ---------------------------------------------------------------------------
# spec grammars


_ATOM = re.compile(
    r"^(?:"
    r"E-\((?P<em>\d+),(?P<en>\d+)(?:,mu=(?P<emu>\d+))?\)"
    r"|E\((?P<vm>\d+),(?P<vn>\d+)(?:,mu=(?P<vmu>\d+))?\)"
    r"|W-\((?P<wmm>\d+)\)"
    r"|W\((?P<wm>\d+)\)"
    r"|Ga\((?P<gr>\d+)\)"
    r"|Ga-"
    r"|Zp\((?P<zs>\d+)\)"
    r")$"
)


def _split_atoms(expr: str) -> list[str]:
    """Split on 'x' at paren depth zero."""
    out, depth, cur = [], 0, []
    for ch in expr:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "x" and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [a.strip() for a in out if a.strip()]


def parse_catalog_spec(text: str):
    """'E-(2,1);p=3', 'Ga(3)xGa-;p=5', 'E-(1,2,mu=2);p=3;e=2' ->
    (algebra, hopf, field)."""
    parts = [p.strip() for p in text.split(";") if p.strip()]
    if not parts:
        raise ValueError("empty algebra spec")
    expr, opts = parts[0], parts[1:]
    p, e = 3, 1
    for opt in opts:
        key, _, val = opt.partition("=")
        if key == "p":
            p = int(val)
        elif key == "e":
            e = int(val)
        else:
            raise ValueError(f"unknown option {key!r} in algebra spec")
    fld = linalg.field(p, e)
    built = None
    for atom in _split_atoms(expr):
        m = _ATOM.match(atom)
        if not m:
            raise ValueError(f"cannot parse algebra atom {atom!r}")
        g = m.groupdict()
        if g["em"] is not None:
            if g["emu"] is not None:
                piece = superalg.catalog("E_mn_mu_minus", fld, m=int(g["em"]), n=int(g["en"]), mu=int(g["emu"]))
            else:
                piece = superalg.catalog("E_mn_minus", fld, m=int(g["em"]), n=int(g["en"]))
        elif g["vm"] is not None:
            if g["vmu"] is not None:
                piece = superalg.catalog("E_mn_mu", fld, m=int(g["vm"]), n=int(g["vn"]), mu=int(g["vmu"]))
            else:
                piece = superalg.catalog("E_mn", fld, m=int(g["vm"]), n=int(g["vn"]))
        elif g["wmm"] is not None:
            piece = superalg.catalog("W_m1_minus", fld, m=int(g["wmm"]))
        elif g["wm"] is not None:
            piece = superalg.catalog("W_m1", fld, m=int(g["wm"]))
        elif g["gr"] is not None:
            piece = superalg.catalog("Ga_r", fld, r=int(g["gr"]))
        elif atom == "Ga-":
            piece = superalg.catalog("Ga_minus", fld)
        else:
            piece = superalg.catalog("Zp_power", fld, s=int(g["zs"]))
        if built is None:
            built = piece
        else:
            built = superalg.tensor(built[0], piece[0], built[1], piece[1])
    return built[0], built[1], fld


def parse_ring_spec(text: str, default_p: int = 3) -> steenrod.SteenrodRing:
    """'std:r,s,eps' / 'std:r=1,s=2,eps=1' / 'emn:m,n', optionally ';p=P'."""
    parts = [p.strip() for p in text.split(";") if p.strip()]
    spec = parts[0]
    p = default_p
    for opt in parts[1:]:
        key, _, val = opt.partition("=")
        if key == "p":
            p = int(val)
        else:
            raise ValueError(f"unknown ring option {key!r}")
    fld = linalg.field(p)
    kind, _, body = spec.partition(":")
    fields = [b.strip() for b in body.split(",") if b.strip()]
    vals: dict[str, int] = {}
    pos: list[int] = []
    for f in fields:
        if "=" in f:
            k, _, v = f.partition("=")
            vals[k.strip()] = int(v)
        else:
            pos.append(int(f))
    if kind == "std":
        if pos:
            r, s, eps = (pos + [0, 0, 0])[:3]
        else:
            r, s, eps = vals.get("r", 0), vals.get("s", 0), vals.get("eps", 0)
        return steenrod.standard_ring(r, s, eps, fld)
    if kind == "emn":
        if pos:
            m, n = pos[:2]
        else:
            m, n = vals["m"], vals["n"]
        return steenrod.emn_ring(m, n, fld)
    raise ValueError(f"unknown ring kind {kind!r}")


def _parse_index(text: str) -> int:
    """'0' -> 0, '1' -> 2, '1/2' -> 1 (indices stored doubled)."""
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        if den.strip() != "2":
            raise ValueError("only halves are allowed as fractional indices")
        return int(num)
    return 2 * int(text)


def _fmt_index(i2: int) -> str:
    return str(i2 // 2) if i2 % 2 == 0 else f"{i2}/2"


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_witt_poly(args, argv):
    table = witt.build_witt_table(args.n, args.p)

    def poly_json(poly):
        return {
            _mono_str(poly.variables, exps): str(c) for exps, c in poly.sorted_terms()
        }

    result = {
        "p": args.p,
        "n": args.n,
        "S": [poly_json(s) for s in table.S],
        "P": [poly_json(s) for s in table.P],
        "N": [poly_json(s) for s in table.N],
    }
    lines = []
    for kind in ("S", "P", "N"):
        for i, d in enumerate(result[kind]):
            lines.append(f"{kind}_{i} = " + " + ".join(f"{c}*{m}" for m, c in sorted(d.items())))
    emit(args, argv, result, text=None if args.json else "\n".join(lines))


def _mono_str(variables, exps) -> str:
    bits = [f"{v}^{e}" if e > 1 else v for v, e in zip(variables, exps) if e]
    return "*".join(bits) if bits else "1"


def _parse_vec(ring: witt.WittRing, text: str) -> witt.WittVector:
    data = json.loads(text)
    return ring.vector([ring.field.element(x) for x in data])


def cmd_witt_eval(args, argv):
    fld = linalg.field(args.p, args.e)
    ring = witt.witt_ring(fld, args.m)
    u = _parse_vec(ring, args.u)
    if args.op in ("add", "mul"):
        if args.v is None:
            raise SystemExit(2)
        v = _parse_vec(ring, args.v)
        out = u + v if args.op == "add" else u * v
    elif args.op == "neg":
        out = -u
    elif args.op == "V":
        out = witt.verschiebung(u)
    elif args.op in ("F", "sigma"):
        out = witt.frobenius_F(u) if args.op == "F" else witt.sigma(u)
    else:
        raise SystemExit(2)
    result = {"op": args.op, "entries": [list(fld.code_coeffs(c)) for c in out.codes]}
    emit(args, argv, result, fld, text=None if args.json else repr(out))


def cmd_dieudonne_classify(args, argv):
    fld = linalg.field(args.p, args.e)
    counts = dieudonne.enumerate_cyclic_quotients(args.m, args.n, fld)
    rows = []
    for label, count in sorted(counts.items(), key=lambda kv: str(kv[0])):
        row = {"kind": label.kind, "m": label.m, "n": label.n, "count": count}
        if label.mu is not None:
            row["mu"] = list(fld.code_coeffs(label.mu))
        rows.append(row)
    result = {"m": args.m, "n": args.n, "labels": rows}
    text = "\n".join(f"{r['count']} x M({r['m']},{r['n']}{',mu' if 'mu' in r else ''})" for r in rows)
    emit(args, argv, result, fld, text=None if args.json else text)


def cmd_algebra_build(args, argv):
    A, H, fld = parse_catalog_spec(args.spec)
    result = A.to_json(H)
    emit(args, argv, result, fld)


def cmd_algebra_hopf_check(args, argv):
    A, H, fld = parse_catalog_spec(args.spec)
    if H is None:
        raise SystemExit("no coproduct data for this algebra (exit 2)")
    rep = superalg.hopf_check(A, H)
    result = rep.to_json()
    text = ("PASS" if rep.passed else "FAIL") + f" ({len(rep.checks)} checks)"
    emit(args, argv, result, fld, text=None if args.json else text)


def cmd_ext_dims(args, argv):
    A, _, fld = parse_catalog_spec(args.algebra)
    dims = homology.ext_dims(A, args.smax)
    res = homology.minimal_resolution(A, args.smax)
    result = {"algebra": args.algebra, "smax": args.smax, "dims": dims}
    lines = ["  s  total  even  odd"]
    for d in dims:
        lines.append(f"  {d['s']}  {d['total']:5d} {d['even']:5d} {d['odd']:4d}")
    emit(args, argv, result, fld, text=None if args.json else "\n".join(lines))


def _parse_class(res, text: str) -> homology.ExtElement:
    bits = [int(b) for b in text.split(",")]
    if len(bits) < 3:
        raise SystemExit(2)
    s, t, coords = bits[0], bits[1], bits[2:]
    return homology.ext_class(res, s, t, coords)


def cmd_ext_product(args, argv):
    A, _, fld = parse_catalog_spec(args.algebra)
    res = homology.minimal_resolution(A, args.smax)
    xi = _parse_class(res, args.left)
    eta = _parse_class(res, args.right)
    prod = homology.yoneda_product(xi, eta)
    result = {
        "left": {"s": xi.s, "t": xi.t, "coords": xi.coords.tolist()},
        "right": {"s": eta.s, "t": eta.t, "coords": eta.coords.tolist()},
        "product": {"s": prod.s, "t": prod.t, "coords": prod.coords.tolist()},
    }
    emit(args, argv, result, fld, text=None if args.json else repr(prod))


def standard_morphism(src_spec: str, dst_spec: str):
    """The canonical catalog morphism between two spec'd algebras: the
    quotient kE-(m,n) ->> kE-(m-1,n), the quotient kE-(m+1,n+1) ->> kE-(m,n,mu),
    or the inclusion kW-(m-1,1) into kE-(m,1)."""
    A, HA, fld = parse_catalog_spec(src_spec)
    B, HB, fld2 = parse_catalog_spec(dst_spec)
    if fld is not fld2:
        raise ValueError("field mismatch between source and target specs")
    la, lb = A.label, B.label
    m_e = re.match(r"^E-\((\d+),(\d+)\)$", la)
    m_e2 = re.match(r"^E-\((\d+),(\d+)\)$", lb)
    m_mu = re.match(r"^E-\((\d+),(\d+),mu=(\d+)\)$", lb)
    m_w = re.match(r"^W\((\d+),1\)-$", la)
    if m_e and m_e2:
        m1, n1 = int(m_e.group(1)), int(m_e.group(2))
        m2, n2 = int(m_e2.group(1)), int(m_e2.group(2))
        if n1 == n2 and m1 == m2 + 1:
            return superalg.quotient_emn_minus(m1, n1, fld)
    if m_e and m_mu:
        m1, n1 = int(m_e.group(1)), int(m_e.group(2))
        m2, n2, mu = int(m_mu.group(1)), int(m_mu.group(2)), int(m_mu.group(3))
        if m1 == m2 + 1 and n1 == n2 + 1:
            return superalg.quotient_to_mu(m2, n2, mu, fld)
    if m_w and m_e2:
        mw = int(m_w.group(1))
        m2, n2 = int(m_e2.group(1)), int(m_e2.group(2))
        if n2 == 1 and m2 == mw + 1:
            return superalg.include_w_minus(m2, fld)
    raise ValueError(f"no standard morphism from {la} to {lb}")


def cmd_ext_inflate(args, argv):
    phi = standard_morphism(args.source, args.target)
    fld = phi.source.field
    mats = homology.induced_ext_map(phi, args.smax)
    res_a = homology.minimal_resolution(phi.source, args.smax)
    res_b = homology.minimal_resolution(phi.target, args.smax)
    degrees = []
    for s in range(args.smax + 1):
        blocks = {}
        for t in (0, 1):
            block = homology.induced_map_on_bidegree(mats, res_a, res_b, s, t)
            kern = linalg.kernel_basis(linalg.FieldMatrix(fld, block))
            blocks[str(t)] = {
                "matrix": block.tolist(),
                "kernel_dim": kern.cols,
                "kernel": kern.codes.T.tolist(),
            }
        degrees.append({"s": s, "blocks": blocks})
    result = {"source": args.source, "target": args.target, "degrees": degrees}
    emit(args, argv, result, fld)


def cmd_ext_identify(args, argv):
    A, _, fld = parse_catalog_spec(args.algebra)
    result = homology.identify_classes(A)
    emit(args, argv, result, fld)


def _load_module_file(path: str) -> homology.SuperModule:
    data = json.loads(Path(path).read_text())
    _validate_against(data, "module.schema.json")
    A, _, fld = parse_catalog_spec(data["algebra"])
    action = []
    for g in A.generators:
        rows = data["action"][g.name]
        action.append(np.array([[fld.element(x).code for x in row] for row in rows], dtype=np.int16))
    return homology.SuperModule(A, action, data["parities"])


def _load_embeddings_file(path: str, B: superalg.SuperAlgebra):
    data = json.loads(Path(path).read_text())
    _validate_against(data, "embeddings.schema.json")
    out = []
    for emb in data["embeddings"]:
        S, _, fld = parse_catalog_spec(emb["source"])
        images = {name: superalg.parse_element(B, expr) for name, expr in emb["images"].items()}
        out.append(superalg.make_morphism(S, B, images))
    return out


def _validate_against(data, schema_name: str):
    if (SCHEMA_DIR / schema_name).exists():
        _validator_for(schema_name).validate(data)


def cmd_module_detect(args, argv):
    M = _load_module_file(args.module)
    rep0 = homology.validate_module(M)
    if not rep0.passed:
        raise SystemExit(f"invalid module: {rep0.failures[0]} (exit 2)")
    embeddings = _load_embeddings_file(args.embeddings, M.algebra)
    report = homology.detect_projectivity(M, embeddings)
    result = report.to_json()
    text = "projective on all embeddings" if report.all_pass else "FAILS on some embedding"
    emit(args, argv, result, M.field, text=None if args.json else text)


def cmd_module_export_regular(args, argv):
    A, _, fld = parse_catalog_spec(args.algebra)
    reg = homology.regular_module(A)
    result = {
        "algebra": args.algebra,
        "dim": reg.dim,
        "action": {
            g.name: [[list(fld.code_coeffs(int(c))) for c in row] for row in reg.action[i]]
            for i, g in enumerate(A.generators)
        },
        "parities": [int(x) for x in reg.parities],
    }
    emit(args, argv, result, fld)


def cmd_steenrod_apply(args, argv):
    R = parse_ring_spec(args.ring, args.p)
    el = steenrod.parse_element(R, args.expr)
    out = steenrod.apply_op(R, args.op, _parse_index(args.i), el)
    result = {
        "ring": args.ring,
        "op": args.op,
        "i": _fmt_index(_parse_index(args.i)),
        "expr": args.expr,
        "value": repr(out),
    }
    emit(args, argv, result, R.field, text=None if args.json else repr(out))


def cmd_steenrod_saturate(args, argv):
    R = parse_ring_spec(args.ring, args.p)
    seed = steenrod.parse_element(R, args.seed)
    sat = steenrod.saturate(R, [seed], args.bound)
    slices = []
    for (s, t) in sorted(sat.spans):
        slices.append(
            {
                "s": s,
                "t": t,
                "dim": sat.slice_dim(s, t),
                "basis": [repr(b) for b in sat.slice_basis(s, t)],
            }
        )
    result = {"ring": args.ring, "seed": args.seed, "bound": args.bound, "slices": slices}
    text = "\n".join(f"({r['s']},{r['t']}): dim {r['dim']}" for r in slices)
    emit(args, argv, result, R.field, text=None if args.json else text)


def cmd_steenrod_classify(args, argv):
    R = parse_ring_spec(args.ring, args.p)
    if not R.label.startswith("std:"):
        raise SystemExit("classify-b36 expects a std ring (exit 2)")
    r, s, eps = (int(x) for x in R.label.split(":")[1].split(","))
    seed = steenrod.parse_element(R, args.seed)
    sat = steenrod.saturate(R, [seed], args.bound)
    verdict = steenrod.classify_b36(R, sat, r, s)
    result = dict(verdict.to_json(), ring=args.ring, seed=args.seed, bound=args.bound)
    emit(args, argv, result, R.field, text=None if args.json else f"case ({verdict.case})")


def cmd_steenrod_serre(args, argv):
    fld = linalg.field(args.p)
    R = steenrod.standard_ring(0, args.s, 0, fld)
    seed = steenrod.parse_element(R, args.seed)
    verdict = steenrod.serre_check(args.s, seed, args.bound)
    result = dict(verdict.to_json(), s=args.s, seed=args.seed, bound=args.bound)
    emit(args, argv, result, fld, text=None if args.json else str(verdict.found))


def cmd_fold_check(args, argv):
    fld = linalg.field(args.p)
    L, HL = superalg.z_lift_emn(args.m, args.n, args.a, fld)
    F, HF = superalg.fold(L, HL)
    E, HE = superalg.catalog("E_mn_minus", fld, m=args.m, n=args.n)
    same = superalg.structurally_equal(F, E, HF, HE)
    degs = {g.name: g.zdegree for g in L.generators}
    result = {"m": args.m, "n": args.n, "a": args.a, "zdegrees": degs, "fold_matches_catalog": same}
    emit(args, argv, result, fld, text=None if args.json else str(same))


# ---------------------------------------------------------------------------
# repro


def _fixture_plan() -> list[tuple[str, list[str]]]:
    """(relative path, argv) for every committed fixture."""
    plan: list[tuple[str, list[str]]] = [
        ("witt_poly_p3_n2.json", ["witt", "poly", "--n", "2", "--p", "3", "--json"]),
        ("witt_poly_p5_n1.json", ["witt", "poly", "--n", "1", "--p", "5", "--json"]),
        ("witt_eval_add_W2F3.json", ["witt", "eval", "--p", "3", "--m", "2", "--op", "add", "--u", "[1,0]", "--v", "[2,0]", "--json"]),
        ("dieudonne_m1n1_p3.json", ["dieudonne", "classify", "--m", "1", "--n", "1", "--p", "3", "--json"]),
        ("dieudonne_m2n1_p3.json", ["dieudonne", "classify", "--m", "2", "--n", "1", "--p", "3", "--json"]),
        ("dieudonne_m2n2_p3.json", ["dieudonne", "classify", "--m", "2", "--n", "2", "--p", "3", "--json"]),
        ("algebra_E21_p3.json", ["algebra", "build", "--spec", "E-(2,1);p=3", "--json"]),
        ("algebra_E11mu2_p3.json", ["algebra", "build", "--spec", "E-(1,1,mu=2);p=3", "--json"]),
        ("hopf_E22_p3.json", ["algebra", "hopf-check", "--spec", "E-(2,2);p=3", "--json"]),
        ("hopf_E11mu2_F9.json", ["algebra", "hopf-check", "--spec", "E-(1,1,mu=5);p=3;e=2", "--json"]),
        ("ext_dims_Gaminus.json", ["ext", "dims", "--algebra", "Ga-;p=3", "--smax", "6", "--json"]),
        ("ext_dims_W21.json", ["ext", "dims", "--algebra", "W(2);p=3", "--smax", "6", "--json"]),
        ("ext_dims_W21minus.json", ["ext", "dims", "--algebra", "W-(2);p=3", "--smax", "6", "--json"]),
        ("ext_dims_E21.json", ["ext", "dims", "--algebra", "E-(2,1);p=3", "--smax", "6", "--json"]),
        ("ext_dims_E22.json", ["ext", "dims", "--algebra", "E-(2,2);p=3", "--smax", "6", "--json"]),
        ("ext_dims_E11mu.json", ["ext", "dims", "--algebra", "E-(1,1,mu=1);p=3", "--smax", "6", "--json"]),
        ("ext_inflate_E21_E11.json", ["ext", "inflate", "--source", "E-(2,1);p=3", "--target", "E-(1,1);p=3", "--smax", "2", "--json"]),
        ("ext_identify_E21.json", ["ext", "identify", "--algebra", "E-(2,1);p=3", "--json"]),
        ("steenrod_betaP0_l1.json", ["steenrod", "apply", "--ring", "std:1,0,1", "--op", "betaP", "--i", "0", "--expr", "l1", "--json"]),
        ("steenrod_P1_zeta2.json", ["steenrod", "apply", "--ring", "std:1,0,1", "--op", "P", "--i", "1", "--expr", "zeta^2", "--json"]),
        ("steenrod_classify_zeta2_x1.json", ["steenrod", "classify-b36", "--ring", "std:1,0,1", "--seed", "zeta^2 + x1", "--bound", "18", "--json"]),
        ("steenrod_classify_l1l2.json", ["steenrod", "classify-b36", "--ring", "std:2,0,0", "--seed", "l1*l2", "--bound", "18", "--json"]),
        ("steenrod_classify_z1.json", ["steenrod", "classify-b36", "--ring", "std:0,1,0", "--seed", "z1", "--bound", "18", "--json"]),
        ("steenrod_serre_z1z2.json", ["steenrod", "serre", "--s", "2", "--seed", "z1 + z2", "--bound", "12", "--json"]),
        ("steenrod_serre_y1y2.json", ["steenrod", "serre", "--s", "2", "--seed", "y1*y2", "--bound", "12", "--json"]),
        ("steenrod_serre_z1.json", ["steenrod", "serre", "--s", "1", "--seed", "z1", "--bound", "12", "--json"]),
        ("fold_E21_a1.json", ["fold", "check", "--m", "2", "--n", "1", "--a", "1", "--p", "3", "--json"]),
        ("fold_E22_a3.json", ["fold", "check", "--m", "2", "--n", "2", "--a", "3", "--p", "3", "--json"]),
    ]
    return plan


def _capture(argv: list[str]) -> str:
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        rc = main(argv)
    if rc not in (0, None):
        raise RuntimeError(f"fixture command failed: {argv}")
    return buf.getvalue()


def cmd_repro(args, argv):
    fixtures = Path(args.fixtures) if args.fixtures else FIXTURE_DIR
    plan = _fixture_plan()
    mismatches = []
    for rel, cmd in plan:
        payload = _capture(cmd)
        path = fixtures / rel
        if args.write:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(payload)
            continue
        if not path.exists():
            mismatches.append((rel, "missing"))
        elif path.read_text() != payload:
            mismatches.append((rel, "differs"))
    if args.write:
        print(f"wrote {len(plan)} fixtures to {fixtures}")
        return 0
    for rel, why in mismatches:
        print(f"MISMATCH {rel}: {why}")
    print(f"{len(plan) - len(mismatches)}/{len(plan)} fixtures match")
    return 1 if mismatches else 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="superelem", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="JSON output (with manifest)")
        sp.add_argument("--table", action="store_true", help="plain text output")
        sp.add_argument("--out", help="write output to a file")

    w = sub.add_parser("witt").add_subparsers(dest="sub", required=True)
    wp = w.add_parser("poly")
    wp.add_argument("--n", type=int, required=True)
    wp.add_argument("--p", type=int, required=True)
    common(wp)
    wp.set_defaults(func=cmd_witt_poly)
    we = w.add_parser("eval")
    we.add_argument("--p", type=int, required=True)
    we.add_argument("--e", type=int, default=1)
    we.add_argument("--m", type=int, required=True)
    we.add_argument("--op", required=True, choices=["add", "mul", "neg", "V", "F", "sigma"])
    we.add_argument("--u", required=True)
    we.add_argument("--v")
    common(we)
    we.set_defaults(func=cmd_witt_eval)

    d = sub.add_parser("dieudonne").add_subparsers(dest="sub", required=True)
    dc = d.add_parser("classify")
    dc.add_argument("--m", type=int, required=True)
    dc.add_argument("--n", type=int, required=True)
    dc.add_argument("--p", type=int, required=True)
    dc.add_argument("--e", type=int, default=1)
    common(dc)
    dc.set_defaults(func=cmd_dieudonne_classify)

    a = sub.add_parser("algebra").add_subparsers(dest="sub", required=True)
    ab = a.add_parser("build")
    ab.add_argument("--spec", required=True)
    common(ab)
    ab.set_defaults(func=cmd_algebra_build)
    ah = a.add_parser("hopf-check")
    ah.add_argument("--spec", required=True)
    common(ah)
    ah.set_defaults(func=cmd_algebra_hopf_check)

    x = sub.add_parser("ext").add_subparsers(dest="sub", required=True)
    xd = x.add_parser("dims")
    xd.add_argument("--algebra", required=True)
    xd.add_argument("--smax", type=int, required=True)
    common(xd)
    xd.set_defaults(func=cmd_ext_dims)
    xp = x.add_parser("product")
    xp.add_argument("--algebra", required=True)
    xp.add_argument("--smax", type=int, required=True)
    xp.add_argument("--left", required=True, help="s,t,c0[,c1,...]")
    xp.add_argument("--right", required=True)
    common(xp)
    xp.set_defaults(func=cmd_ext_product)
    xi = x.add_parser("inflate")
    xi.add_argument("--source", required=True)
    xi.add_argument("--target", required=True)
    xi.add_argument("--smax", type=int, required=True)
    common(xi)
    xi.set_defaults(func=cmd_ext_inflate)
    xid = x.add_parser("identify")
    xid.add_argument("--algebra", required=True)
    common(xid)
    xid.set_defaults(func=cmd_ext_identify)

    mo = sub.add_parser("module").add_subparsers(dest="sub", required=True)
    md = mo.add_parser("detect")
    md.add_argument("--module", required=True)
    md.add_argument("--embeddings", required=True)
    common(md)
    md.set_defaults(func=cmd_module_detect)
    mx = mo.add_parser("export-regular")
    mx.add_argument("--algebra", required=True)
    common(mx)
    mx.set_defaults(func=cmd_module_export_regular)

    st = sub.add_parser("steenrod").add_subparsers(dest="sub", required=True)
    sa = st.add_parser("apply")
    sa.add_argument("--ring", required=True)
    sa.add_argument("--op", required=True, choices=["P", "betaP"])
    sa.add_argument("--i", required=True)
    sa.add_argument("--expr", required=True)
    sa.add_argument("--p", type=int, default=3)
    common(sa)
    sa.set_defaults(func=cmd_steenrod_apply)
    ss = st.add_parser("saturate")
    ss.add_argument("--ring", required=True)
    ss.add_argument("--seed", required=True)
    ss.add_argument("--bound", type=int, required=True)
    ss.add_argument("--p", type=int, default=3)
    common(ss)
    ss.set_defaults(func=cmd_steenrod_saturate)
    sc = st.add_parser("classify-b36")
    sc.add_argument("--ring", required=True)
    sc.add_argument("--seed", required=True)
    sc.add_argument("--bound", type=int, required=True)
    sc.add_argument("--p", type=int, default=3)
    common(sc)
    sc.set_defaults(func=cmd_steenrod_classify)
    se = st.add_parser("serre")
    se.add_argument("--s", type=int, required=True)
    se.add_argument("--seed", required=True)
    se.add_argument("--bound", type=int, required=True)
    se.add_argument("--p", type=int, default=3)
    common(se)
    se.set_defaults(func=cmd_steenrod_serre)

    f = sub.add_parser("fold").add_subparsers(dest="sub", required=True)
    fc = f.add_parser("check")
    fc.add_argument("--m", type=int, required=True)
    fc.add_argument("--n", type=int, required=True)
    fc.add_argument("--a", type=int, required=True)
    fc.add_argument("--p", type=int, default=3)
    common(fc)
    fc.set_defaults(func=cmd_fold_check)

    r = sub.add_parser("repro").add_subparsers(dest="sub", required=True)
    ra = r.add_parser("all")
    ra.add_argument("--fixtures", help="fixture directory (default: repo fixtures/)")
    ra.add_argument("--write", action="store_true", help="regenerate the committed fixtures")
    ra.set_defaults(func=cmd_repro)

    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rc = args.func(args, argv)
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0 if rc is None else rc


if __name__ == "__main__":
    sys.exit(main())
