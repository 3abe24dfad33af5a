"""Benchmark harness: degrade, solve with each method, score, summarize.

Scenario files are INI-style ``key = value`` text::

    [scenario]
    name = robustness
    image = synthetic          ; or a path to a .pgm/.ppm/.rlf file
    size = 64
    rank = 2
    regions = 4
    w_cartoon = 0.7
    phi = identity             ; identity | downsample | blur | mask
    keep_probability = 0.4
    blur_size = 4
    mask =                     ; path, for phi = mask
    noise = student-t          ; student-t | cauchy | ged
    noise_param = 2
    intensity = 0.1
    sweep =                    ; optional comma list of intensities
    seeds = 0, 1, 2, 3, 4
    methods = rlrp-pps, clrp

    [solver]
    tau = 0.1
    mu = 0.5
    ...

For a synthetic image every seed draws its own ground truth, noise and
(for down-sampling) mask, all from that seed.
"""
import configparser
import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from .core import RLRPError, SolverConfig
from .imageio import read_image
from .linops import Blur, Downsample, Identity, Mask, describe
from .metrics import CSV_COLUMNS, MetricReport, format_value, report
from .noise import NoiseSpec, corrupt
from .pdhg import pdhg_solve
from .pps import pps_solve
from .synth import make_ground_truth

METHODS = ("rlrp-pps", "rlrp-pdhg", "clrp")
SUMMARY_COLUMNS = ("method", "phi", "noise", "n", "failed", "median_snr_db", "iqr_snr_db", "median_ssim")

# Desk-scale analog of the synthetic-image settings (64x64 instead of 256x256;
# the nuclear-norm weight scales with the side length).
DESK_SCALE = SolverConfig(tau=0.1, mu=0.5, c=0.05, beta=2.0, gamma=1.3, r=1.0, s=2.01,
                          epsilon=1e-2, max_iter=200)
INPAINTING_MAX_ITER = 500


def default_max_iter(phi):
    """500 iterations for mask/down-sampling problems, 200 otherwise."""
    return INPAINTING_MAX_ITER if phi in ("mask", "downsample") else DESK_SCALE.max_iter


def solve(method, b0, phi, cfg):
    """Run one named method; ``clrp`` is the same model with ``c = inf``."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if method == "clrp":
        cfg = cfg.replace(c=math.inf)
        method = "rlrp-pps" if isinstance(phi, Identity) else "rlrp-pdhg"
    if method == "rlrp-pps":
        if not isinstance(phi, Identity):
            raise ValueError("the splitting solver only handles the identity operator")
        return pps_solve(b0, cfg)
    return pdhg_solve(b0, phi, cfg)


@dataclass
class BenchmarkScenario:
    name: str = "scenario"
    image: Optional[np.ndarray] = None
    size: int = 64
    rank: int = 2
    regions: int = 4
    w_cartoon: float = 0.7
    phi: str = "identity"
    keep_probability: float = 0.4
    blur_size: int = 4
    mask: Optional[np.ndarray] = None
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    intensities: tuple = ()
    methods: tuple = ("rlrp-pps", "clrp")
    cfg: Optional[SolverConfig] = None
    seeds: tuple = (0, 1, 2, 3, 4)

    def __post_init__(self):
        if self.cfg is None:
            self.cfg = DESK_SCALE.replace(max_iter=default_max_iter(self.phi))
        self.seeds = tuple(int(s) for s in self.seeds)
        self.methods = tuple(self.methods)
        self.intensities = tuple(float(i) for i in self.intensities) or (self.noise.intensity,)
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.phi not in ("identity", "downsample", "blur", "mask"):
            raise ValueError(f"unknown phi {self.phi!r}")
        if "rlrp-pps" in self.methods and self.phi != "identity":
            raise ValueError("method rlrp-pps requires phi = identity")
        if self.phi == "mask" and self.mask is None:
            raise ValueError("phi = mask needs a mask image")

    @property
    def repeats(self):
        return len(self.seeds)

    @property
    def image_label(self):
        return f"synthetic-{self.size}" if self.image is None else self.name

    def clean_image(self, seed):
        if self.image is not None:
            return self.image
        return make_ground_truth(self.size, self.rank, self.regions, seed, self.w_cartoon).composite

    def operator(self, seed, shape):
        if self.phi == "identity":
            return Identity()
        if self.phi == "downsample":
            return Downsample(self.keep_probability, seed).materialize(shape)
        if self.phi == "blur":
            return Blur.average(self.blur_size)
        return Mask(self.mask)

    def phi_label(self, seed):
        if self.phi == "downsample":
            return describe(Downsample(self.keep_probability, seed))
        if self.phi == "blur":
            return f"blur:{self.blur_size}x{self.blur_size}"
        return self.phi


def _run_case(scenario, intensity, seed):
    clean = scenario.clean_image(seed)
    phi = scenario.operator(seed, clean.shape)
    spec = NoiseSpec(scenario.noise.family, intensity, seed, scenario.noise.param)
    b0 = corrupt(clean, phi, spec)
    common = dict(image=scenario.image_label, phi=scenario.phi_label(seed), noise=spec.label, seed=seed)
    rows = [report(clean, b0, method="observed", iterations=0, time_s=0.0, **common)]
    for method in scenario.methods:
        start = time.perf_counter()
        try:
            res = solve(method, b0, phi, scenario.cfg)
        except RLRPError:
            rows.append(MetricReport(method=method, snr_db=math.nan, ssim=math.nan,
                                     iterations=-1, time_s=time.perf_counter() - start, **common))
            continue
        rows.append(report(clean, res.restored, method=method, iterations=res.iterations,
                           time_s=time.perf_counter() - start, **common))
    return rows


def worker_count():
    env = os.environ.get("RLRP_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


@dataclass
class BenchmarkResult:
    rows: list
    summary: list

    def csv(self, drop_time=False):
        return rows_to_csv(self.rows, drop_time)


def run_benchmark(scenario, workers=None):
    """Run every (intensity, seed) case; rows come back in a fixed order.

    Solver failures on one seed are recorded as rows with ``nan`` metrics
    and ``iterations = -1``; other seeds still run.
    """
    cases = [(i, s) for i in scenario.intensities for s in scenario.seeds]
    workers = workers or worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda c: _run_case(scenario, *c), cases))
    else:
        chunks = [_run_case(scenario, *c) for c in cases]
    rows = [r for chunk in chunks for r in chunk]
    return BenchmarkResult(rows, summarize(rows))


def summarize(rows):
    """Median and interquartile range of SNR per (method, phi family, noise)."""
    groups = {}
    for r in rows:
        key = (r.method, r.phi.split(":")[0], r.noise)
        groups.setdefault(key, []).append(r)
    out = []
    for (method, phi, noise), rs in groups.items():
        snrs = np.array([r.snr_db for r in rs if r.iterations >= 0])
        ssims = np.array([r.ssim for r in rs if r.iterations >= 0])
        if len(snrs):
            with np.errstate(invalid="ignore"):
                q1, med, q3 = np.percentile(snrs, [25, 50, 75])
            med_ssim = float(np.median(ssims))
        else:
            q1 = med = q3 = med_ssim = math.nan
        out.append(dict(method=method, phi=phi, noise=noise, n=len(rs),
                        failed=sum(r.iterations < 0 for r in rs),
                        median_snr_db=float(med), iqr_snr_db=float(q3 - q1), median_ssim=med_ssim))
    return out


def median_snr(summary, method, noise=None):
    for s in summary:
        if s["method"] == method and (noise is None or s["noise"] == noise):
            return s["median_snr_db"]
    raise KeyError(method)


def rows_to_csv(rows, drop_time=False):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = [c for c in CSV_COLUMNS if not (drop_time and c == "time_s")]
    w.writerow(cols)
    for r in rows:
        cells = r.row()
        if drop_time:
            cells = cells[:-1]
        w.writerow(cells)
    return buf.getvalue()


def summary_to_csv(summary):
    buf = io.StringIO()
    w = csv.DictWriter(buf, SUMMARY_COLUMNS, lineterminator="\n")
    w.writeheader()
    for s in summary:
        w.writerow({k: (format_value(v) if isinstance(v, float) else v) for k, v in s.items()})
    return buf.getvalue()


def read_csv(text):
    """Parse benchmark CSV back into MetricReport rows."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected columns {reader.fieldnames}")
    return [MetricReport(d["image"], d["method"], d["phi"], d["noise"], int(d["seed"]),
                         float(d["snr_db"]), float(d["ssim"]), int(d["iterations"]),
                         float(d["time_s"])) for d in reader]


# ------------------------------------------------------------------ scenarios


def _floats(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


def load_scenario(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with open(path) as fh:
        parser.read_file(fh)
    return scenario_from_config(parser, base_dir=os.path.dirname(os.path.abspath(path)))


def scenario_from_config(parser, base_dir="."):
    sc = parser["scenario"] if parser.has_section("scenario") else {}
    get = sc.get
    kwargs = {}
    image = get("image", "synthetic").strip()
    if image and image != "synthetic":
        kwargs["image"] = read_image(os.path.join(base_dir, image))
    for key, conv in (("name", str), ("size", int), ("rank", int), ("regions", int),
                      ("w_cartoon", float), ("phi", str), ("keep_probability", float),
                      ("blur_size", int)):
        if get(key, "").strip():
            kwargs[key] = conv(get(key).strip())
    if get("mask", "").strip():
        kwargs["mask"] = read_image(os.path.join(base_dir, get("mask").strip()))
    family = get("noise", "student-t").strip()
    default_param = {"student-t": 2.0, "cauchy": 1.0, "ged": 1.0}.get(family, 2.0)
    kwargs["noise"] = NoiseSpec(family, float(get("intensity", "0.1")), 0,
                                float(get("noise_param", default_param)))
    if get("sweep", "").strip():
        kwargs["intensities"] = _floats(get("sweep"))
    if get("seeds", "").strip():
        kwargs["seeds"] = tuple(int(x) for x in _floats(get("seeds")))
    if get("methods", "").strip():
        kwargs["methods"] = tuple(m.strip() for m in get("methods").split(",") if m.strip())
    cfg = DESK_SCALE.replace(max_iter=default_max_iter(kwargs.get("phi", "identity")))
    if parser.has_section("solver"):
        known = {f.name: f for f in fields(SolverConfig)}
        changes = {}
        for key, value in parser["solver"].items():
            if key not in known:
                raise ValueError(f"unknown solver key {key!r}")
            changes[key] = int(value) if key == "max_iter" else float(value)
        cfg = cfg.replace(**changes)
    kwargs["cfg"] = cfg
    return BenchmarkScenario(**kwargs)
