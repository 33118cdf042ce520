"""Minimal reader for the LP text the package emits, used to check rows by
substitution independently of the in-memory model."""

import re

TERM = re.compile(r"([+-])\s*([0-9.eE+-]+)\s+([A-Za-z_][A-Za-z0-9_]*)")
ROW = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*):\s*(.*?)\s*(<=|>=|=)\s*([-+0-9.eE]+);$")


def parse_lp(text):
    objective, rows, free, binaries = None, {}, set(), set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("/*"):
            continue
        if line.startswith("min:"):
            objective = dict((v, float(s + c)) for s, c, v in TERM.findall(line[4:]))
            continue
        if line.startswith("free "):
            free.update(v.strip() for v in line[5:].rstrip(";").split(","))
            continue
        if line.startswith("bin "):
            binaries.add(line[4:].rstrip(";").strip())
            continue
        m = ROW.match(line)
        if not m:
            raise ValueError(f"unparsed LP line: {line}")
        name, lhs, op, rhs = m.groups()
        terms = {}
        for s, c, v in TERM.findall(lhs):
            terms[v] = terms.get(v, 0.0) + float(s + c)
        rows[name] = (terms, op, float(rhs))
    return objective, rows, free, binaries


def violated_rows(rows, values, tol=1e-6):
    bad = []
    for name, (terms, op, rhs) in rows.items():
        lhs = sum(c * values[v] for v, c in terms.items())
        if (op == "<=" and lhs > rhs + tol) or (op == ">=" and lhs < rhs - tol) or \
                (op == "=" and abs(lhs - rhs) > tol):
            bad.append(name)
    return bad
