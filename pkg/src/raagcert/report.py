"""Versioned, byte-stable JSON reports and their prose rendering."""
from __future__ import annotations

import hashlib
import json
from importlib import resources

from . import __version__

SCHEMA_VERSION = "1"

CITATIONS = {
    "laurence": "Laurence-Servatius: inversions, partial conjugations, transvections and "
    "graph symmetries generate Aut(A_Γ)",
    "ccv": "Charney-Crisp-Vogtmann: Out(A_Γ) = Out⁰(A_Γ) ⋊ Q with Q a finite group of "
    "graph symmetries",
    "invariance": "pure outer actions preserve links of non-cones, non-singleton components, "
    "extended stars, and intersections and stars of invariant subgraphs",
    "torelli": "Toinet; Wade: the Torelli subgroup of Out(A_Γ) is torsion-free",
    "z2rank": "commuting involutions in GL_k(R) are simultaneously diagonalisable, so the "
    "Z/2-rank of Out(A_Γ) equals the number of vertices",
    "rigidity": "SOut(F_n) -> Out(A_Γ) is trivial for n >= 6 when Γ has fewer than ½·C(n,2) "
    "vertices, no n vertices share a star, and Γ is not D_n joined with another graph",
    "landazuri_seitz": "Landazuri-Seitz: minimal degrees of non-trivial projective "
    "representations of PSL_n(Z/pZ)",
    "mennicke": "Mennicke: the congruence kernel of SL_n(Z/p^a) -> SL_n(Z/p) is normally "
    "generated by p-th powers of elementary matrices",
    "finite_actions": "Out(F_n), n >= 6, acts on sets of size at most C(n+1,2) through Z/2; "
    "SOut(F_n) acts trivially on sets of size at most ½·C(n+1,2)",
}

COMMAND_CITATIONS = {
    "analyze": [],
    "generators": ["laurence", "ccv"],
    "invariants": ["invariance"],
    "certify": ["rigidity", "invariance", "torelli", "ccv"],
    "bounds": ["landazuri_seitz", "mennicke", "finite_actions"],
    "oracle": ["mennicke"],
    "compare": ["z2rank", "torelli"],
    "batch": ["rigidity"],
    "batch-summary": [],
}


def digest(*blobs: bytes) -> str:
    h = hashlib.sha256()
    for i, blob in enumerate(blobs):
        if i:
            h.update(b"\0")
        h.update(blob)
    return "sha256:" + h.hexdigest()


def make_report(
    command: str, results: dict, input_bytes: tuple[bytes, ...] = (), error: str | None = None
) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "raagcert",
        "tool_version": __version__,
        "command": command,
        "input_digest": digest(*input_bytes) if input_bytes else None,
        "results": results,
        "citations": [CITATIONS[k] for k in COMMAND_CITATIONS[command]],
    }
    if error is not None:
        report["error"] = error
    return report


def dumps(report: dict, compact: bool = False) -> str:
    if compact:
        return json.dumps(report, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return json.dumps(report, sort_keys=True, ensure_ascii=False, indent=2)


def load_schema() -> dict:
    return json.loads(resources.files("raagcert").joinpath("report.schema.json").read_text())


# --- prose ------------------------------------------------------------------

def _fmt_set(labels: list[str]) -> str:
    return "{" + ", ".join(labels) + "}"


def render_text(report: dict) -> str:
    cmd, res = report["command"], report["results"]
    lines = [f"raagcert {report['tool_version']} {cmd}"]
    if report.get("input_digest"):
        lines.append(f"input {report['input_digest']}")
    if "error" in report:
        lines.append(f"error: {report['error']}")
    elif cmd == "analyze":
        lines += [
            f"vertices: {res['vertex_count']}, edges: {res['edge_count']}",
            "components: " + " ".join(_fmt_set(c) for c in res["components"]),
            "join factors: " + " ".join(_fmt_set(c) for c in res["join_decomposition"]["factors"]),
            "clique factor: " + _fmt_set(res["join_decomposition"]["clique_factor"]),
            "equal-star classes: " + " ".join(_fmt_set(c) for c in res["equal_star_partition"]),
            f"cone: {res['is_cone']}",
            f"|Aut(Γ)| = {res['automorphism_count']}",
        ]
    elif cmd == "generators":
        c = res["inventory"]["counts"]
        lines += [
            f"inversions: {c['inversions']}",
            f"transvections: {c['transvections']}",
            f"partial conjugations: {c['partial_conjugations']} "
            f"({c['partial_conjugations_nonredundant']} non-redundant in Out)",
            f"graph symmetries: {c['symmetries']}",
        ]
    elif cmd == "invariants":
        lines.append(f"completeness: {res['completeness_flag']}")
        for m in res["members"]:
            premises = ", ".join(_fmt_set(p) for p in m["premises"])
            lines.append(f"  {_fmt_set(m['set'])} by {m['rule']}({premises})")
        lines += [f"note: {n}" for n in res["notes"]]
    elif cmd in ("certify", "batch"):
        v = res["verdict"]
        lines.append(f"n = {v['hypotheses']['n']}: {v['outcome']}"
                     + (f" by {v['by']}" if v["by"] else ""))
        if v["failed"]:
            lines.append("failed hypotheses: " + ", ".join(v["failed"]))
        if v["reason"]:
            lines.append(v["reason"])
        lines += v["proof_sketch"]
    elif cmd == "bounds":
        for row in res["table"]:
            lines.append(
                f"n={row['n']} p={row['p']}: dim >= {row['min_dim']['bound']} "
                f"({row['min_dim']['case']})"
            )
        for row in res["thresholds"]:
            lines.append(
                f"n={row['n']}: m = {row['m_rigidity']}, Out acts through Z/2 on <= "
                f"{row['out_action']} points, SOut trivially on <= {row['sout_action']}"
            )
        if res.get("oracle"):
            lines.append(render_text({"command": "oracle", "results": res["oracle"],
                                      "tool_version": report["tool_version"]}))
    elif cmd == "oracle":
        for run in res.get("runs", []):
            if "skipped" in run:
                lines.append(f"SKIP n={run['n']} p={run['p']} alpha={run['alpha']}: {run['skipped']}")
        for check in res["checks"]:
            lines.append(f"{'PASS' if check['pass'] else 'FAIL'} {check['name']}: {check['detail']}")
    elif cmd == "compare":
        lines.append(res["statement"])
    elif cmd == "batch-summary":
        lines.append(f"{res['total']} graphs: " + ", ".join(
            f"{k} {v}" for k, v in sorted(res["counts"].items())))
    if report.get("citations"):
        lines.append("cited facts:")
        lines += [f"  - {c}" for c in report["citations"]]
    return "\n".join(lines)
