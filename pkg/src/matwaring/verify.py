"""Independent certificate verification.

Works purely from the serialized document: re-parses the embedded polynomial,
re-evaluates it on every stored argument tuple, recomputes the signed sum and
every similarity residual from the stored transforms. None of the
construction pipeline is imported, so a passing verdict does not trust it.
"""

import numpy as np

from .freealg import evaluate, parse
from .serialize import (
    FORMAT_NAME,
    complex_from_json,
    matrix_from_json,
)

_SIGNS = {
    "four-term": [1.0, -1.0, 1.0, -1.0],
    "two-term": [1.0, -1.0],
}


def _fro(M):
    return float(np.linalg.norm(M))


def verify_certificate(doc):
    """Check every bound stored in a certificate document.

    Returns a list of failure descriptions; an empty list means the
    certificate verifies.
    """
    failures = []
    if doc.get("format") != FORMAT_NAME:
        return [f"not a certificate document (format={doc.get('format')!r})"]
    mode = doc.get("mode")
    coeffs = [complex_from_json(c) for c in doc["coefficients"]]

    # sign discipline: only +-1 coefficients are admissible, plus one free
    # trace coefficient in five-term mode
    if mode in _SIGNS:
        if coeffs != _SIGNS[mode]:
            failures.append(
                f"coefficient discipline: {mode} requires {_SIGNS[mode]}, "
                f"certificate carries {coeffs}"
            )
    elif mode == "five-term":
        if len(coeffs) != 5 or coeffs[1:] != [1.0, -1.0, 1.0, -1.0]:
            failures.append(
                "coefficient discipline: five-term requires (c0, 1, -1, 1, -1), "
                f"certificate carries {coeffs}"
            )
    else:
        return [f"unknown mode {mode!r}"]

    cert_tol = float(doc["cert_tol"])
    for idx, step in enumerate(doc.get("similarity_steps", [])):
        label = step.get("label") or f"step {idx}"
        T = matrix_from_json(step["t"])
        T_inv = matrix_from_json(step["t_inv"])
        source = matrix_from_json(step["source"])
        target = matrix_from_json(step["target"])
        n = T.shape[0]
        r_inv = _fro(T @ T_inv - np.eye(n))
        if r_inv > cert_tol:
            failures.append(
                f"similarity step {label!r}: inverse residual {r_inv:.3e} "
                f"exceeds {cert_tol:.1e}"
            )
        cond = _fro(T) * _fro(T_inv)
        r_map = _fro(T @ source @ T_inv - target)
        bound = cert_tol * cond * _fro(source)
        if r_map > bound:
            failures.append(
                f"similarity step {label!r}: map residual {r_map:.3e} "
                f"exceeds {bound:.3e}"
            )

    target = matrix_from_json(doc["target"])
    n = target.shape[0]
    if doc.get("tuples") is not None:
        if doc.get("polynomial") is None:
            return failures + ["certificate has tuples but no polynomial text"]
        f = parse(doc["polynomial"])
        images = []
        for k, tp in enumerate(doc["tuples"]):
            mats = [matrix_from_json(a) for a in tp]
            if any(a.shape != (n, n) for a in mats):
                failures.append(f"tuple {k} has matrices of the wrong size")
                return failures
            images.append(evaluate(f, mats))
    else:
        images = [matrix_from_json(W) for W in doc["terms"]]

    if len(images) != len(coeffs):
        failures.append(
            f"{len(coeffs)} coefficients but {len(images)} terms/tuples"
        )
        return failures
    recon = sum(c * im for c, im in zip(coeffs, images))
    residual = _fro(target - recon)
    bound = float(doc["residual_bound"])
    if residual > bound:
        failures.append(
            f"reconstruction residual {residual:.3e} exceeds bound {bound:.3e}"
        )
    return failures
