"""Certificate and matrix (de)serialization.

Matrices travel as {"n": n, "entries": [[re, im], ...]} row-major. The
certificate file is a single self-describing JSON document embedding the
polynomial text, every matrix, the coefficients, the tolerances in force and
all similarity steps, so a third party can re-verify without this library.

Output is byte-deterministic: keys are sorted and every float is written
with 17 significant digits (lossless for doubles).
"""

import json

import numpy as np

FORMAT_NAME = "waring-certificate"
FORMAT_VERSION = 1


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {M.shape}")
    return {
        "n": n,
        "entries": [[float(z.real), float(z.imag)] for z in M.ravel()],
    }


def matrix_from_json(doc):
    n = int(doc["n"])
    entries = doc["entries"]
    if len(entries) != n * n:
        raise ValueError(f"matrix document claims n={n} but has "
                         f"{len(entries)} entries")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(n, n)


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(pair):
    return complex(pair[0], pair[1])


def similarity_step_to_json(cert):
    return {
        "label": cert.label,
        "t": matrix_to_json(cert.t),
        "t_inv": matrix_to_json(cert.t_inv),
        "source": matrix_to_json(cert.source),
        "target": matrix_to_json(cert.target),
        "residual_inverse": cert.residual_inverse,
        "residual_map": cert.residual_map,
        "condition_estimate": cert.condition_estimate,
    }


def certificate_to_json(cert, tols, seed=None, budget=None):
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "mode": cert.mode,
        "n": int(cert.target.shape[0]),
        "polynomial": cert.polynomial,
        "target": matrix_to_json(cert.target),
        "witness": matrix_to_json(cert.witness),
        "coefficients": [complex_to_json(c) for c in cert.coefficients],
        "terms": [matrix_to_json(W) for W in cert.terms],
        "tuples": (
            None if cert.tuples is None
            else [[matrix_to_json(a) for a in tp] for tp in cert.tuples]
        ),
        "residual": cert.residual,
        "residual_bound": cert.residual_bound,
        "cert_tol": tols.cert_tol,
        "tolerances": {
            "gap_tol": tols.gap_tol,
            "rank_tol": tols.rank_tol,
            "solve_tol": tols.solve_tol,
            "cert_tol": tols.cert_tol,
            "cluster_tol": tols.cluster_tol,
            "hollow_tol": tols.hollow_tol,
            "split_tol": tols.split_tol,
            "end_tol": tols.end_tol,
            "eig_tol": tols.eig_tol,
            "trace_tol": tols.trace_tol,
        },
        "seed": cert.seed if cert.seed is not None else seed,
        "budget": cert.budget if cert.budget is not None else budget,
        "similarity_steps": (
            [similarity_step_to_json(c) for c in cert.steps]
            + [similarity_step_to_json(c) for c in cert.term_certs]
        ),
    }
    return doc


def _write_value(value, out):
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format(value, ".17g"))
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _write_value(value[key], out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _write_value(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_canonical(doc):
    """Deterministic JSON text: sorted keys, floats at 17 significant digits."""
    out = []
    _write_value(doc, out)
    out.append("\n")
    return "".join(out)


def save_certificate(path, cert, tols, seed=None, budget=None):
    doc = certificate_to_json(cert, tols, seed=seed, budget=budget)
    with open(path, "w") as fh:
        fh.write(dumps_canonical(doc))


def load_json(path):
    with open(path) as fh:
        return json.load(fh)
