"""On-disk run directory: one CSV per parameter group plus manifests.

Indices in the files are 1-based (component ``l``, variable ``j``,
observation ``i``); iterations count from 1. Floats are written with 17
significant digits so a round trip is exact. ``config.json`` is a flat
mapping: every `RunConfig` field, the record count and shapes, plus any
data metadata supplied by the caller.
"""

import json
import os

import numpy as np

from .sampler import RunConfig, Trace

FLOAT = "%.17g"


def _save(path, header, cols, fmts):
    M = np.column_stack(cols) if cols else np.empty((0, len(header)))
    np.savetxt(path, M, fmt=fmts, delimiter=",", header=",".join(header), comments="")


def _load(path, ncols):
    M = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return M.reshape(-1, ncols)


def _grid(T, k, p=None):
    if p is None:
        it, l = np.meshgrid(np.arange(1, T + 1), np.arange(1, k + 1), indexing="ij")
        return it.ravel(), l.ravel()
    it, l, j = np.meshgrid(np.arange(1, T + 1), np.arange(1, k + 1), np.arange(1, p + 1), indexing="ij")
    return it.ravel(), l.ravel(), j.ravel()


def write_trace(run_dir, trace, config, data_meta=None, summary=None):
    os.makedirs(run_dir, exist_ok=True)
    T, k, p = trace.kappa.shape
    n = trace.f.shape[2]
    it, l, j = _grid(T, k, p)
    _save(os.path.join(run_dir, "kappa.csv"), ["iter", "l", "j", "value"],
          [it, l, j, trace.kappa.ravel()], ["%d", "%d", "%d", FLOAT])
    _save(os.path.join(run_dir, "psi.csv"), ["iter", "l", "j", "value"],
          [it, l, j, trace.psi.ravel()], ["%d", "%d", "%d", FLOAT])
    it2, l2 = _grid(T, k)
    _save(os.path.join(run_dir, "tau.csv"), ["iter", "l", "value"],
          [it2, l2, trace.tau.ravel()], ["%d", "%d", FLOAT])
    _save(os.path.join(run_dir, "phi.csv"), ["iter", "l", "weight", "sign", "signals"],
          [it2, l2, trace.weight.ravel(), trace.sign.ravel(), trace.signals.ravel()],
          ["%d", "%d", FLOAT, "%d", "%d"])
    _save(os.path.join(run_dir, "sigma2.csv"), ["iter", "sigma2", "lambda"],
          [np.arange(1, T + 1), trace.sigma2, trace.lam], ["%d", FLOAT, FLOAT])
    _save(os.path.join(run_dir, "f.csv"), ["iter", "l"] + [f"f{i}" for i in range(1, n + 1)],
          [it2, l2, trace.f.reshape(T * k, n)], ["%d", "%d"] + [FLOAT] * n)
    manifest = dict(config.to_dict(), records=T, p=p, n=n)
    for key, value in (data_meta or {}).items():
        if key in manifest:
            raise ValueError(f"data metadata key {key!r} clashes with the manifest")
        manifest[key] = value
    with open(os.path.join(run_dir, "config.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if summary is not None:
        with open(os.path.join(run_dir, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_manifest(run_dir):
    path = os.path.join(run_dir, "config.json")
    if not os.path.exists(path):
        raise FileNotFoundError(f"no trace manifest at {path}")
    with open(path) as fh:
        return json.load(fh)


def read_trace(run_dir):
    """Returns ``(trace, config, manifest)``."""
    man = read_manifest(run_dir)
    T, k, p, n = man["records"], man["k"], man["p"], man["n"]
    kappa = _load(os.path.join(run_dir, "kappa.csv"), 4)[:, 3].reshape(T, k, p)
    psi = _load(os.path.join(run_dir, "psi.csv"), 4)[:, 3].reshape(T, k, p)
    tau = _load(os.path.join(run_dir, "tau.csv"), 3)[:, 2].reshape(T, k)
    phi = _load(os.path.join(run_dir, "phi.csv"), 5)
    s2 = _load(os.path.join(run_dir, "sigma2.csv"), 3)
    f = _load(os.path.join(run_dir, "f.csv"), 2 + n)[:, 2:].reshape(T, k, n)
    trace = Trace(
        kappa=kappa,
        tau=tau,
        psi=psi,
        weight=phi[:, 2].reshape(T, k),
        sign=phi[:, 3].reshape(T, k),
        sigma2=s2[:, 1],
        lam=s2[:, 2],
        signals=phi[:, 4].astype(np.int64).reshape(T, k),
        f=f,
    )
    cfg = RunConfig(**{name: man[name] for name in RunConfig.__dataclass_fields__ if name in man})
    return trace, cfg, man
