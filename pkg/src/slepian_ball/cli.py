"""Command-line surface: kernel / eigen / shannon / project / synth.

Persistence formats
-------------------
Binary matrices (.mat): 8-byte magic "SLEPB001", then u32 rows, u32 cols,
u8 scalar tag (0 = float64, 1 = complex as interleaved float64), all
little-endian, followed by the row-major payload.  CSV output carries 17
significant digits so doubles round-trip.  All files are written atomically
(temp file + rename).

Region descriptors: ``product:R1,R2,theta1,theta2`` (radians),
``mask:<path>,R1,R2`` (pixel list ``theta phi indicator``), ``fullball``.

Config precedence: command-line flags > config file (``key = value`` lines)
> built-in defaults; the effective configuration, defaults included, is
echoed into meta.json.

Exit codes: 0 success, 2 configuration/validation error, 1 numerical failure.
``SLEPIAN_THREADS`` caps the linear-algebra thread pools.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import struct
import sys
import tempfile
from dataclasses import dataclass, asdict

MAGIC = b"SLEPB001"

_DEFAULTS = {
    "domain": "fl",
    "P": 16,
    "L": 16,
    "K": 1.0,
    "M": 50,
    "region": "fullball",
    "out": ".",
    "order": None,
    "count": 12,
    "grid": None,
    "J": None,
    "signal": None,
}


@dataclass
class RunConfig:
    command: str
    domain: str
    P: int
    L: int
    K: float
    M: int
    region: str
    out: str
    order: int | None
    count: int
    grid: str | None
    J: int | None
    signal: str | None

    def validate(self):
        if self.domain not in ("fl", "fb"):
            raise ValueError(f"domain must be 'fl' or 'fb', got {self.domain!r}")
        if self.P < 1:
            raise ValueError(f"P must be >= 1, got {self.P}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.domain == "fb":
            if self.K <= 0:
                raise ValueError(f"K must be > 0, got {self.K}")
            if self.M < 1:
                raise ValueError(f"M must be >= 1, got {self.M}")
        if self.count < 0:
            raise ValueError(f"count must be >= 0, got {self.count}")


# ---------------------------------------------------------------------------
# atomic IO and the binary matrix format
# ---------------------------------------------------------------------------

def _atomic_write(path: str, data: bytes):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix(path: str, arr):
    import numpy as np
    a = np.atleast_2d(np.asarray(arr))
    if a.ndim != 2:
        raise ValueError("only matrices and vectors are supported")
    if np.iscomplexobj(a):
        tag, payload = 1, np.ascontiguousarray(a, dtype="<c16").tobytes()
    else:
        tag, payload = 0, np.ascontiguousarray(a, dtype="<f8").tobytes()
    header = MAGIC + struct.pack("<IIB", a.shape[0], a.shape[1], tag)
    _atomic_write(path, header + payload)


def read_matrix(path: str):
    import numpy as np
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != MAGIC:
        raise ValueError(f"{path}: bad magic, not a SLEPB001 matrix")
    rows, cols, tag = struct.unpack("<IIB", blob[8:17])
    dtype = "<c16" if tag == 1 else "<f8"
    return np.frombuffer(blob[17:], dtype=dtype).reshape(rows, cols).copy()


def _write_text(path: str, text: str):
    _atomic_write(path, text.encode())


def _fmt(x) -> str:
    return f"{x:.17g}"


def _write_json(path: str, obj):
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# region and config parsing
# ---------------------------------------------------------------------------

def parse_region(spec: str):
    from . import regions as reg
    if spec == "fullball":
        return reg.full_ball()
    kind, _, rest = spec.partition(":")
    if kind == "product":
        parts = rest.split(",")
        if len(parts) != 4:
            raise ValueError(f"region 'product' needs R1,R2,theta1,theta2; got {rest!r}")
        r1, r2, t1, t2 = map(float, parts)
        return reg.ProductSymmetric(r1, r2, t1, t2)
    if kind == "mask":
        parts = rest.rsplit(",", 2)
        if len(parts) != 3:
            raise ValueError(f"region 'mask' needs <path>,R1,R2; got {rest!r}")
        path, r1, r2 = parts[0], float(parts[1]), float(parts[2])
        mask = reg.AngularMask.from_text(path)
        return reg.ProductMask(mask, r1, r2)
    if kind == "json":
        with open(rest) as fh:
            desc = json.load(fh)
        t = desc.get("type")
        if t == "fullball":
            return reg.full_ball()
        if t == "product":
            return reg.ProductSymmetric(desc["R1"], desc["R2"],
                                        desc["theta1"], desc["theta2"])
        if t == "mask":
            mask = reg.AngularMask.from_text(desc["path"])
            return reg.ProductMask(mask, desc["R1"], desc["R2"])
        raise ValueError(f"unknown region type in {rest}: {t!r}")
    raise ValueError(f"unknown region descriptor {spec!r} "
                     "(expected product:..., mask:..., json:..., or fullball)")


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (need key = value): {line!r}")
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


_INT_KEYS = {"P", "L", "M", "order", "count", "J"}
_FLOAT_KEYS = {"K"}


def _merge_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        raw = _read_config_file(args.config)
        for key, val in raw.items():
            if key not in merged:
                raise ValueError(f"unknown config key {key!r}")
            if key in _INT_KEYS:
                merged[key] = int(val)
            elif key in _FLOAT_KEYS:
                merged[key] = float(val)
            else:
                merged[key] = val
    for key in merged:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            merged[key] = cli_val
    cfg = RunConfig(command=args.command, **merged)
    cfg.validate()
    return cfg


def _band(cfg: RunConfig):
    from .kernels import FourierBesselBand, FourierLaguerreBand
    if cfg.domain == "fl":
        return FourierLaguerreBand(cfg.P, cfg.L)
    return FourierBesselBand(cfg.K, cfg.L, cfg.M)


def _meta(cfg: RunConfig, extra: dict | None = None) -> dict:
    meta = {"config": asdict(cfg)}
    if extra:
        meta.update(extra)
    return meta


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_shannon(cfg: RunConfig) -> int:
    from . import eigen
    region = parse_region(cfg.region)
    band = _band(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    n = eigen.shannon_fl(region, band) if cfg.domain == "fl" \
        else eigen.shannon_fb(region, band)
    out = os.path.join(cfg.out, "shannon.json")
    _write_json(out, _meta(cfg, {"shannon": n}))
    print(f"shannon {cfg.domain}: {_fmt(n)}")
    return 0


def cmd_kernel(cfg: RunConfig) -> int:
    import numpy as np
    from . import eigen, kernels
    from .regions import ProductMask, ProductSymmetric
    region = parse_region(cfg.region)
    band = _band(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    traces = {}
    if cfg.domain == "fl":
        if isinstance(region, ProductMask):
            fac = kernels.kernel_fl_mask(band, region)
            write_matrix(os.path.join(cfg.out, "E.mat"), fac.E)
            write_matrix(os.path.join(cfg.out, "G_mask.mat"), fac.G_angular)
            traces["E"] = float(np.trace(fac.E))
            traces["G_mask"] = float(np.trace(fac.G_angular).real)
            traces["kernel"] = fac.trace
        elif isinstance(region, ProductSymmetric):
            E = kernels.E_matrix(band.P, region.R1, region.R2)
            write_matrix(os.path.join(cfg.out, "E.mat"), E)
            traces["E"] = float(np.trace(E))
            gsum = 0.0
            orders = range(band.L) if cfg.order is None else [cfg.order]
            for m in orders:
                G = kernels.G_matrix(m, band.L, region.theta1, region.theta2)
                write_matrix(os.path.join(cfg.out, f"G_m{m}.mat"), G)
                gsum += (2.0 if m > 0 else 1.0) * float(np.trace(G))
            if cfg.order is None:
                traces["G_all_orders"] = gsum
                traces["kernel"] = traces["E"] * gsum
        else:
            raise ValueError("kernel export supports product and mask regions")
        traces["shannon"] = eigen.shannon_fl(region, band)
    else:
        orders = range(band.L) if cfg.order is None else [cfg.order]
        total = 0.0
        for m in orders:
            km = kernels.kernel_fb_fixed_order(m, band, region)
            write_matrix(os.path.join(cfg.out, f"B_m{m}.mat"), km.matrix)
            total += (2.0 if m > 0 else 1.0) * km.trace
        if cfg.order is None:
            traces["kernel"] = total
        traces["shannon"] = eigen.shannon_fb(region, band)
    _write_json(os.path.join(cfg.out, "meta.json"), _meta(cfg, {"traces": traces}))
    return 0


def _eigen_csv(res) -> str:
    lines = ["rank,lambda,m,lambda_radial,lambda_angular"]
    for rank, info in enumerate(res.infos):
        m = "" if info.m is None else str(info.m)
        l1 = "" if info.lam_radial is None else _fmt(info.lam_radial)
        l2 = "" if info.lam_angular is None else _fmt(info.lam_angular)
        lines.append(f"{rank},{_fmt(info.lam)},{m},{l1},{l2}")
    return "\n".join(lines) + "\n"


def cmd_eigen(cfg: RunConfig) -> int:
    import numpy as np
    from . import eigen, transforms
    region = parse_region(cfg.region)
    band = _band(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    # an order filter needs ranks beyond the first `count`, so retain all
    keep = None if (cfg.grid and cfg.order is not None) else max(cfg.count, 1)
    solve = eigen.solve_fl if cfg.domain == "fl" else eigen.solve_fb
    res = solve(region, band, keep=keep)
    _write_text(os.path.join(cfg.out, "eigenvalues.csv"), _eigen_csv(res))
    n_vec = min(max(cfg.count, 1), len(res))
    write_matrix(os.path.join(cfg.out, "eigenvectors.mat"), res.vectors(n_vec))
    _write_json(os.path.join(cfg.out, "shannon.json"), _meta(cfg, {
        "shannon": res.shannon,
        "eigenvalue_sum": float(res.eigenvalues.sum()),
        "raw_eigenvalue_range": list(res.raw_eigenvalue_range),
    }))
    if cfg.grid:
        try:
            n_r, n_t = (int(v) for v in cfg.grid.split(","))
        except Exception as exc:
            raise ValueError(f"--grid needs 'nr,ntheta', got {cfg.grid!r}") from exc
        ranks = [a for a in range(len(res))
                 if cfg.order is None or res.infos[a].m == cfg.order][:cfg.count]
        r_max = getattr(region, "R2", None)
        r_max = 2.0 * r_max if r_max and not math.isinf(r_max) else 50.0
        rs = np.linspace(r_max / n_r, r_max, n_r)
        ts = np.linspace(0.0, math.pi, n_t)
        Rg, Tg = np.meshgrid(rs, ts, indexing="ij")
        pts = np.column_stack([Rg.ravel(), Tg.ravel(), np.zeros(Rg.size)])
        for rank in ranks:
            coeffs = res.coeffs(rank)
            if cfg.domain == "fl":
                vals = transforms.synthesis_fl(coeffs, pts)
            else:
                vals = transforms.synthesis_fb(coeffs, pts)
            rows = ["r,theta,value"]
            for (rr, tt, vv) in zip(Rg.ravel(), Tg.ravel(), vals.real):
                rows.append(f"{_fmt(rr)},{_fmt(tt)},{_fmt(vv)}")
            _write_text(os.path.join(cfg.out, f"eigenfunction_{rank:04d}.csv"),
                        "\n".join(rows) + "\n")
    return 0


def cmd_project(cfg: RunConfig) -> int:
    import numpy as np
    from . import eigen, transforms
    if cfg.domain != "fl":
        raise ValueError("projection is provided for the Fourier-Laguerre domain")
    if not cfg.signal:
        raise ValueError("project needs --signal <coefficient .mat file>")
    region = parse_region(cfg.region)
    band = _band(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    raw = read_matrix(cfg.signal)
    if raw.size == band.size:
        h = eigen.HarmonicCoeffs(raw.reshape(-1).astype(complex), band)
    else:
        # sampled-signal file: rows are radial nodes of the band's analysis
        # grid, columns the flattened angular grid
        grid = transforms.analysis_grid(band)
        n_ang = grid.theta_nodes.size * grid.phi_nodes.size
        if raw.shape != (grid.radial_nodes.size, n_ang):
            raise ValueError(
                f"signal file shape {raw.shape} matches neither the band size "
                f"{band.size} nor the analysis grid "
                f"({grid.radial_nodes.size}, {n_ang})")
        h = transforms.analysis_fl(raw.astype(complex), grid, band)
    res = eigen.solve_fl(region, band)
    h_alpha = transforms.slepian_coeffs(h, res)
    J = cfg.J if cfg.J is not None else int(math.floor(res.shannon))
    J = min(J, h_alpha.size)
    fl_sorted = np.sort(np.abs(h.values))[::-1]
    sl_sorted = np.sort(np.abs(h_alpha))[::-1]
    lines = ["index,abs_fl_sorted,abs_slepian_sorted"]
    for i in range(fl_sorted.size):
        lines.append(f"{i + 1},{_fmt(fl_sorted[i])},{_fmt(sl_sorted[i])}")
    _write_text(os.path.join(cfg.out, "decay.csv"), "\n".join(lines) + "\n")
    q_rows = {str(j): transforms.quality_measure(h_alpha, res, j)
              for j in sorted({J, h_alpha.size, max(J // 2, 1)})}
    _write_json(os.path.join(cfg.out, "q.json"), _meta(cfg, {
        "J": J, "shannon": res.shannon, "Q": q_rows,
    }))
    print(f"Q({J}) = {_fmt(q_rows[str(J)])}")
    return 0


def cmd_synth(cfg: RunConfig) -> int:
    import numpy as np
    from . import eigen, transforms
    if not cfg.signal:
        raise ValueError("synth needs --signal <coefficient .mat file>")
    band = _band(cfg)
    os.makedirs(cfg.out, exist_ok=True)
    vec = read_matrix(cfg.signal).reshape(-1)
    if vec.size != band.size:
        raise ValueError(
            f"signal file has {vec.size} coefficients, band needs {band.size}")
    coeffs = eigen.HarmonicCoeffs(vec.astype(complex), band)
    if not cfg.grid:
        raise ValueError("synth needs --grid nr,ntheta,nphi")
    try:
        n_r, n_t, n_p = (int(v) for v in cfg.grid.split(","))
    except Exception as exc:
        raise ValueError(f"--grid needs 'nr,ntheta,nphi', got {cfg.grid!r}") from exc
    rs = np.linspace(50.0 / n_r, 50.0, n_r)
    ts = np.linspace(0.0, math.pi, n_t)
    ps = np.linspace(0.0, 2 * math.pi, n_p, endpoint=False)
    Rg, Tg, Pg = np.meshgrid(rs, ts, ps, indexing="ij")
    pts = np.column_stack([Rg.ravel(), Tg.ravel(), Pg.ravel()])
    synth = transforms.synthesis_fl if cfg.domain == "fl" else transforms.synthesis_fb
    vals = synth(coeffs, pts)
    rows = ["r,theta,phi,re,im"]
    for (rr, tt, pp, vv) in zip(Rg.ravel(), Tg.ravel(), Pg.ravel(), vals):
        rows.append(f"{_fmt(rr)},{_fmt(tt)},{_fmt(pp)},{_fmt(vv.real)},{_fmt(vv.imag)}")
    _write_text(os.path.join(cfg.out, "values.csv"), "\n".join(rows) + "\n")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slepian-ball",
        description="Spatial-spectral concentration on the ball",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--domain", choices=("fl", "fb"))
        p.add_argument("--P", type=int)
        p.add_argument("--L", type=int)
        p.add_argument("--K", type=float)
        p.add_argument("--M", type=int)
        p.add_argument("--region")
        p.add_argument("--out")
        p.add_argument("--order", type=int)
        p.add_argument("--count", type=int)
        p.add_argument("--grid")
        p.add_argument("--J", type=int)
        p.add_argument("--signal")
    return parser


_COMMANDS = {
    "kernel": cmd_kernel,
    "eigen": cmd_eigen,
    "shannon": cmd_shannon,
    "project": cmd_project,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    threads = os.environ.get("SLEPIAN_THREADS")
    if threads:
        # must land before numpy initializes its BLAS thread pools
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args)
        region_check = cfg.region  # parsed lazily per command; validate now
        parse_region(region_check)
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[cfg.command](cfg)
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numpy.linalg.LinAlgError and kin
        if type(exc).__name__ == "LinAlgError":
            print(f"numerical failure: {exc}", file=sys.stderr)
            return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
