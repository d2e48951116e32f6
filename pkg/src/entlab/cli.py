"""Command line front end.

Subcommands build states and channels from small JSON specs, evaluate
measures and relations, scan state families for censorship growth, and
write structured reports. Every stochastic ingredient draws its seed from
the root --seed value through a labeled hash, so rerunning a command with
identical arguments produces a byte-identical report body.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .channels import (
    QuantumChannel,
    build_cluster_noise,
    build_correlated_flip,
    build_depolarizing,
    build_dephasing,
    build_pairwise_correlated,
    build_random_unitary_noise,
    combine,
    compose,
    identity_channel,
)
from .conjectures import (
    censorship_scan,
    eval_relation1,
    eval_relation2,
    eval_relation34,
)
from .errors import ConfigError
from .measures import (
    assisted_mutual_information,
    environment_information,
    excess_leak,
    excess_leak_set,
    information_leak,
    max_entropy_defect,
    mutual_information,
    total_defect,
)
from .sync import (
    binomial_tail,
    fit_mixture,
    quantum_randomization_demo,
    tail_probability,
    triple_moment,
    weight_distribution,
)
from .zoo import (
    bell,
    bitflip_code_encode,
    cluster_state,
    dicke_state,
    ghz,
    line_edges,
    plus_all,
    random_circuit_state,
)


class SeedStream:
    """Per-use seeds derived from one root by hashing a label and index.

    The derivation is the documented contract: the seed handed to a
    component is the first 8 bytes of sha256("{root}:{label}:{index}").
    Asking for a seed without a root is a configuration error.
    """

    def __init__(self, root):
        self.root = root
        self.labels = []

    def derive(self, label: str, index: int = 0) -> int:
        if self.root is None:
            raise ConfigError(
                f"'{label}' uses randomness; a root seed is required (pass --seed)",
                field="seed",
            )
        self.labels.append(f"{label}:{index}")
        digest = hashlib.sha256(f"{self.root}:{label}:{index}".encode()).digest()
        return int.from_bytes(digest[:8], "big")


def _amplitude(x) -> complex:
    # scalars are real amplitudes; [re, im] pairs select a phase
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ConfigError(f"amplitude {x!r} should be a number or [re, im]")
        return complex(float(x[0]), float(x[1]))
    return complex(float(x), 0.0)


def _spec_field(spec: dict, key: str, owner: str, cast=None):
    if key not in spec:
        raise ConfigError(f"{owner} needs '{key}'", field=f"{owner}.{key}")
    value = spec[key]
    return cast(value) if cast is not None else value


def build_state(spec: dict, seeds: SeedStream, owner: str = "state"):
    """PureState from a declarative spec like {"family": "ghz", "n": 3}."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError(
            f"{owner} spec must be an object with a 'family' tag", field=f"{owner}.family"
        )
    family = spec["family"]
    if family in ("product", "plus_all"):
        return plus_all(_spec_field(spec, "n", owner, int))
    if family == "bell":
        return bell()
    if family == "ghz":
        return ghz(_spec_field(spec, "n", owner, int))
    if family == "cluster":
        n = _spec_field(spec, "n", owner, int)
        edges = spec.get("edges")
        if edges is None:
            graph = spec.get("graph", "line")
            if graph != "line":
                raise ConfigError(
                    f"unknown cluster graph '{graph}'", field=f"{owner}.graph"
                )
            edges = line_edges(n)
        return cluster_state(n, edges)
    if family == "dicke":
        return dicke_state(
            _spec_field(spec, "n", owner, int),
            _spec_field(spec, "excitations", owner, int),
        )
    if family == "random_circuit":
        n = _spec_field(spec, "n", owner, int)
        depth = _spec_field(spec, "depth", owner, int)
        seed = int(spec["seed"]) if "seed" in spec else seeds.derive(f"{owner}.random_circuit")
        return random_circuit_state(n, depth, seed)
    if family == "bitflip_code":
        amps = spec.get("logical", [1.0, 0.0])
        if not isinstance(amps, (list, tuple)) or len(amps) != 2:
            raise ConfigError("'logical' must be two amplitudes", field=f"{owner}.logical")
        a, b = (_amplitude(x) for x in amps)
        norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if norm < 1e-12:
            raise ConfigError("logical amplitudes are all zero", field=f"{owner}.logical")
        return bitflip_code_encode(a / norm, b / norm)
    raise ConfigError(f"unknown state family '{family}'", field=f"{owner}.family")


def build_channel(spec: dict, seeds: SeedStream, owner: str = "channel") -> QuantumChannel:
    """QuantumChannel from a declarative spec; seeded builders pull from
    the stream unless the spec pins its own seed."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError(
            f"{owner} spec must be an object with a 'family' tag", field=f"{owner}.family"
        )
    family = spec["family"]
    if family == "identity":
        return identity_channel(int(spec.get("n", 1)))
    if family == "depolarizing":
        return build_depolarizing(
            _spec_field(spec, "p", owner, float), int(spec.get("qubit", 0))
        )
    if family == "dephasing":
        return build_dephasing(
            _spec_field(spec, "epsilon", owner, float), int(spec.get("qubit", 0))
        )
    if family == "correlated_flip":
        return build_correlated_flip(
            _spec_field(spec, "epsilon", owner, float),
            _spec_field(spec, "pauli", owner, str),
        )
    if family == "pairwise_correlated":
        return build_pairwise_correlated(
            _spec_field(spec, "n", owner, int),
            _spec_field(spec, "p1", owner, float),
            _spec_field(spec, "p2", owner, float),
            basis=str(spec.get("basis", "X")),
        )
    if family == "random_unitary":
        seed = int(spec["seed"]) if "seed" in spec else seeds.derive(f"{owner}.random_unitary")
        return build_random_unitary_noise(
            _spec_field(spec, "n", owner, int),
            _spec_field(spec, "epsilon", owner, float),
            seed,
        )
    if family == "cluster":
        n = _spec_field(spec, "n", owner, int)
        edges = spec.get("edges")
        if edges is None:
            edges = line_edges(n)
        seed = int(spec["seed"]) if "seed" in spec else seeds.derive(f"{owner}.cluster")
        return build_cluster_noise(n, edges, _spec_field(spec, "epsilon", owner, float), seed)
    if family == "product":
        parts = _spec_field(spec, "parts", owner, list)
        built = []
        for i, part in enumerate(parts):
            sub_owner = f"{owner}.parts[{i}]"
            qubits = _spec_field(part, "qubits", sub_owner, tuple)
            built.append((build_channel(part, seeds, sub_owner), tuple(int(q) for q in qubits)))
        return combine(built, n=int(spec["n"]) if "n" in spec else None)
    if family == "compose":
        stages = _spec_field(spec, "stages", owner, list)
        if not stages:
            raise ConfigError("'stages' must be non-empty", field=f"{owner}.stages")
        out = build_channel(stages[0], seeds, f"{owner}.stages[0]")
        for i, stage in enumerate(stages[1:], start=1):
            out = compose(build_channel(stage, seeds, f"{owner}.stages[{i}]"), out)
        return out
    raise ConfigError(f"unknown channel family '{family}'", field=f"{owner}.family")


def load_spec(text, field: str):
    """Parse inline JSON, or read a JSON file when given a path."""
    if text is None:
        return None
    if isinstance(text, dict):
        return text
    s = text.strip()
    if s.startswith("{"):
        try:
            return json.loads(s)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad inline JSON for {field}: {exc}", field=field)
    try:
        with open(s, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {field} spec: {exc}", field=field)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad JSON in {field} file: {exc}", field=field)


def _parse_qubits(value, field="qubits"):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return tuple(int(q) for q in value)
    try:
        return tuple(int(part) for part in str(value).split(",") if part.strip() != "")
    except ValueError:
        raise ConfigError(f"cannot parse qubit list {value!r}", field=field)


_INCLUDE_FULL = {"never": False, "auto": None, "always": True}


def _measure_entry(name, value, qubits, diagnostics):
    return {
        "measure": name,
        "value": value,
        "qubits": list(qubits) if qubits is not None else None,
        "diagnostics": diagnostics,
    }


def measure_results(params: dict, seeds: SeedStream) -> list:
    name = params.get("name")
    state_spec = params.get("state")
    channel_spec = params.get("channel")
    state = build_state(state_spec, seeds) if state_spec else None
    channel = build_channel(channel_spec, seeds) if channel_spec else None
    qubits = _parse_qubits(params.get("qubits"))

    def need_channel():
        if channel is None:
            raise ConfigError(f"measure '{name}' needs a channel spec", field="channel")
        return channel

    def need_state():
        if state is None:
            raise ConfigError(f"measure '{name}' needs a state spec", field="state")
        return state

    def need_pair():
        if qubits is None or len(qubits) != 2:
            raise ConfigError(f"measure '{name}' needs exactly two qubits", field="qubits")
        return qubits

    def need_set():
        if not qubits:
            raise ConfigError(f"measure '{name}' needs a qubit set", field="qubits")
        return qubits

    if name == "leak":
        value = information_leak(need_channel(), need_set(), input_state=state)
        return [_measure_entry(name, value, qubits, {})]
    if name == "environment-info":
        value = environment_information(need_channel(), need_set(), input_state=state)
        return [_measure_entry(name, value, qubits, {})]
    if name == "mutual-information":
        a, b = need_pair()
        return [_measure_entry(name, mutual_information(need_state(), a, b), qubits, {})]
    if name == "excess-leak":
        a, b = need_pair()
        value = excess_leak(need_channel(), a, b, input_state=state)
        return [_measure_entry(name, value, qubits, {})]
    if name == "assisted":
        a, b = need_pair()
        kwargs = {"seed": seeds.derive("measure.assisted")}
        if params.get("restarts") is not None:
            kwargs["restarts"] = int(params["restarts"])
        if params.get("sweeps") is not None:
            kwargs["sweeps"] = int(params["sweeps"])
        res = assisted_mutual_information(need_state(), a, b, **kwargs)
        diag = dict(res.diagnostics)
        diag["search_value"] = res.search_value
        diag["floor"] = res.floor
        return [_measure_entry(name, res.value, qubits, diag)]
    if name == "set-defect":
        res = max_entropy_defect(need_state(), need_set())
        diag = dict(res.diagnostics)
        diag["constrained_entropy"] = res.constrained_entropy
        diag["subset_entropy"] = res.subset_entropy
        return [_measure_entry(name, res.value, qubits, diag)]
    if name == "set-excess-leak":
        res = excess_leak_set(need_channel(), need_set(), input_state=state)
        diag = dict(res.diagnostics)
        diag["constrained_entropy"] = res.constrained_entropy
        diag["subset_entropy"] = res.subset_entropy
        return [_measure_entry(name, res.value, qubits, diag)]
    if name == "total-defect":
        kwargs = {}
        if params.get("truncate") is not None:
            kwargs["max_subset_size"] = int(params["truncate"])
        mode = params.get("include_full", "auto")
        if mode not in _INCLUDE_FULL:
            raise ConfigError(
                f"include_full must be one of {sorted(_INCLUDE_FULL)}", field="include_full"
            )
        res = total_defect(need_state(), include_full=_INCLUDE_FULL[mode], **kwargs)
        diag = dict(res.diagnostics)
        diag.update(
            {
                "value_without_full": res.value_without_full,
                "full_set_term": res.full_set_term,
                "included_sizes": res.included_sizes,
                "included_full": res.included_full,
            }
        )
        return [_measure_entry(name, res.value, qubits, diag)]
    raise ConfigError(f"unknown measure '{name}'", field="name")


def relation_results(params: dict, seeds: SeedStream) -> list:
    rid = int(params.get("id", 0))
    state_spec = params.get("state")
    channel_spec = params.get("channel")
    if state_spec is None:
        raise ConfigError("relation evaluation needs a state spec", field="state")
    if channel_spec is None:
        raise ConfigError("relation evaluation needs a channel spec", field="channel")
    state = build_state(state_spec, seeds)
    channel = build_channel(channel_spec, seeds)
    qubits = _parse_qubits(params.get("qubits"))
    level = float(params.get("level", 1.0))
    budget = {}
    if params.get("restarts") is not None:
        budget["restarts"] = int(params["restarts"])
    if params.get("sweeps") is not None:
        budget["sweeps"] = int(params["sweeps"])

    if rid in (1, 2):
        if qubits is None or len(qubits) != 2:
            raise ConfigError("relations 1 and 2 need exactly two qubits", field="qubits")
        a, b = qubits
        if rid == 1:
            verdict = eval_relation1(state, channel, a, b, level)
        else:
            verdict = eval_relation2(
                state, channel, a, b, level, seed=seeds.derive("relation.2"), **budget
            )
    elif rid in (3, 4):
        if not qubits or len(qubits) < 2:
            raise ConfigError("relations 3 and 4 need a qubit set", field="qubits")
        if rid == 3:
            verdict = eval_relation34(state, channel, qubits, level, mode="marginal")
        else:
            verdict = eval_relation34(
                state,
                channel,
                qubits,
                level,
                mode="decomposed",
                seed=seeds.derive("relation.4"),
                **budget,
            )
    else:
        raise ConfigError(f"relation id must be 1..4, got {rid}", field="id")
    return [verdict.to_dict()]


_FAMILY_BUILDERS = {
    "product": lambda n, params, seeds: plus_all(n),
    "ghz": lambda n, params, seeds: ghz(n),
    "cluster-line": lambda n, params, seeds: cluster_state(n, line_edges(n)),
    "dicke-half": lambda n, params, seeds: dicke_state(n, n // 2),
    "random-circuit": lambda n, params, seeds: random_circuit_state(
        n, int(params.get("depth", 2)), seeds.derive("censorship.family", n)
    ),
}


def censorship_results(params: dict, seeds: SeedStream) -> list:
    family = params.get("family")
    if family not in _FAMILY_BUILDERS:
        raise ConfigError(
            f"unknown family '{family}'; choose from {sorted(_FAMILY_BUILDERS)}",
            field="family",
        )
    n_min = int(params.get("n_min", 2))
    n_max = int(params.get("n_max", 6))
    if n_min < 2 or n_max < n_min:
        raise ConfigError(f"bad size range [{n_min}, {n_max}]", field="n_min")
    builder = _FAMILY_BUILDERS[family]
    report = censorship_scan(
        lambda n: builder(n, params, seeds),
        range(n_min, n_max + 1),
        truncation=int(params.get("truncate", 3)),
        include_full=str(params.get("include_full", "never")),
    )
    results = [
        _measure_entry("family-total-defect", value, None, {"n": n, "family": family})
        for n, value in zip(report.sizes, report.values)
    ]
    results.append(
        _measure_entry(
            "growth-exponent",
            report.exponent,
            None,
            {
                "family": family,
                "growth": report.growth,
                "truncation": report.truncation,
                "include_full": report.include_full,
            },
        )
    )
    return results


def sync_results(params: dict, seeds: SeedStream) -> list:
    results = []
    p1 = params.get("p1")
    p2 = params.get("p2")
    if (p1 is None) != (p2 is None):
        raise ConfigError("p1 and p2 must be given together", field="p1")
    if p1 is not None:
        model = fit_mixture(float(p1), float(p2))
        base_diag = {"p1": float(p1), "p2": float(p2), "in_burst_rate": model.h}
        results.append(
            _measure_entry("mixture-burst-probability", model.pi, None, dict(base_diag))
        )
        n = params.get("n")
        threshold = params.get("threshold")
        if (n is None) != (threshold is None):
            raise ConfigError("n and threshold must be given together", field="n")
        if n is not None:
            diag = dict(base_diag, n=int(n), threshold=int(threshold))
            results.append(
                _measure_entry(
                    "correlated-tail",
                    tail_probability(model, int(n), int(threshold)),
                    None,
                    diag,
                )
            )
            results.append(
                _measure_entry(
                    "independent-tail",
                    binomial_tail(int(n), int(threshold), float(p1)),
                    None,
                    dict(diag),
                )
            )
        tm = triple_moment(model, params.get("p3"))
        results.append(
            _measure_entry(
                "triple-moment-ratio",
                tm.ratio,
                None,
                {
                    "implied_p3": tm.implied_p3,
                    "independent_p3": tm.independent_p3,
                    "target_p3": tm.target_p3,
                    "target_ratio": tm.target_ratio,
                },
            )
        )
    channel_spec = params.get("channel")
    if channel_spec is not None:
        dist = weight_distribution(build_channel(channel_spec, seeds))
        results.append(
            _measure_entry(
                "mean-error-weight",
                dist.mean_weight(),
                None,
                {
                    "conditional_mean_weight": dist.conditional_mean_weight(),
                    "probabilities": [float(x) for x in dist.probabilities],
                },
            )
        )
    if not results:
        raise ConfigError("sync needs --p1/--p2 or a channel spec", field="p1")
    return results


def qec_results(params: dict, seeds: SeedStream) -> list:
    eps = params.get("epsilon")
    if eps is None:
        raise ConfigError("qec demo needs --epsilon", field="epsilon")
    logical = params.get("logical", [1.0, 0.0])
    named = {
        "zero": [1.0, 0.0],
        "one": [0.0, 1.0],
        "plus": [1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)],
    }
    if isinstance(logical, str):
        if logical in named:
            logical = named[logical]
        else:
            logical = [part for part in logical.split(",") if part.strip() != ""]
    if len(logical) != 2:
        raise ConfigError("logical amplitudes must be two numbers", field="logical")
    a, b = (_amplitude(x) for x in logical)
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    if norm < 1e-12:
        raise ConfigError("logical amplitudes are all zero", field="logical")
    demo = quantum_randomization_demo(float(eps), (a / norm, b / norm))
    diag = {
        "epsilon": demo.epsilon,
        "logical": [[(a / norm).real, (a / norm).imag], [(b / norm).real, (b / norm).imag]],
    }
    return [
        _measure_entry("decoded-fidelity", demo.fidelity_after_decode, None, dict(diag)),
        _measure_entry(
            "majority-readout-success", demo.classical_majority_success, None, dict(diag)
        ),
    ]


_KINDS = {
    "measure": measure_results,
    "relation": relation_results,
    "censorship": censorship_results,
    "sync": sync_results,
    "qec_demo": qec_results,
}


def run_experiment(config: dict, seeds: SeedStream) -> list:
    evaluations = config.get("evaluations")
    if not isinstance(evaluations, list) or not evaluations:
        raise ConfigError("config needs a non-empty 'evaluations' list", field="evaluations")
    results = []
    for i, entry in enumerate(evaluations):
        if not isinstance(entry, dict):
            raise ConfigError(f"evaluation {i} is not an object", field=f"evaluations[{i}]")
        kind = entry.get("kind")
        if kind not in _KINDS:
            raise ConfigError(
                f"evaluation {i} has unknown kind {kind!r}; choose from {sorted(_KINDS)}",
                field=f"evaluations[{i}].kind",
            )
        params = dict(entry)
        # top-level specs are defaults; an evaluation may override them
        for key in ("state", "channel"):
            if key not in params and key in config:
                params[key] = config[key]
        results.extend(_KINDS[kind](params, seeds))
    return results


def _jsonable(obj):
    """Plain JSON types only, floats rounded so reruns are byte-identical."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return bool(obj) if obj is not None else None
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return repr(value)
        return float(f"{value:.12g}") + 0.0
    if isinstance(obj, str):
        return obj
    if isinstance(obj, complex):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    return repr(obj)


def render_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def _flatten(obj, prefix, into):
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(obj[key], f"{prefix}{key}.", into)
    elif isinstance(obj, list):
        into[prefix[:-1]] = json.dumps(obj, sort_keys=True)
    else:
        into[prefix[:-1]] = "" if obj is None else obj


def render_csv(report: dict) -> str:
    rows = []
    for result in report["results"]:
        flat = {}
        _flatten(_jsonable(result), "", flat)
        rows.append(flat)
    columns = sorted({key for row in rows for key in row})
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["index"] + columns)
    for i, row in enumerate(rows):
        writer.writerow([i] + [row.get(col, "") for col in columns])
    return buffer.getvalue()


def assemble_report(config: dict, results: list, seeds: SeedStream) -> dict:
    return {
        "config": config,
        "results": results,
        "diagnostics": {
            "result_count": len(results),
            "seed_labels": list(seeds.labels),
        },
        "version": __version__,
    }


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _add_common(parser):
    parser.add_argument("--seed", type=_u64, default=argparse.SUPPRESS, help="root seed (u64)")
    parser.add_argument("--out", default=argparse.SUPPRESS, help="write the report here")
    parser.add_argument(
        "--format",
        choices=("json", "csv"),
        default=argparse.SUPPRESS,
        help="report format (default json)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entlab",
        description="Noise correlation measures, relation checks, and scans.",
    )
    parser.add_argument("--seed", type=_u64, default=None, help="root seed (u64)")
    parser.add_argument("--out", default=None, help="write the report here")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("measure", help="evaluate one measure")
    _add_common(p)
    p.add_argument("--name", required=True, help="which measure to evaluate")
    p.add_argument("--state", help="state spec (inline JSON or a file path)")
    p.add_argument("--channel", help="channel spec (inline JSON or a file path)")
    p.add_argument("--qubits", help="comma-separated register positions")
    p.add_argument("--truncate", type=int, help="subset-size cap for total-defect")
    p.add_argument("--include-full", dest="include_full", default="auto",
                   choices=("never", "auto", "always"))
    p.add_argument("--restarts", type=int, help="search restarts for assisted")
    p.add_argument("--sweeps", type=int, help="search sweeps for assisted")

    p = sub.add_parser("relation", help="check one relation at a level")
    _add_common(p)
    p.add_argument("--id", type=int, required=True, choices=(1, 2, 3, 4))
    p.add_argument("--level", type=float, default=1.0)
    p.add_argument("--state", required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--qubits", required=True)
    p.add_argument("--restarts", type=int)
    p.add_argument("--sweeps", type=int)

    p = sub.add_parser("censorship", help="total-defect growth over a family")
    _add_common(p)
    p.add_argument("--family", required=True, choices=sorted(_FAMILY_BUILDERS))
    p.add_argument("--n-min", dest="n_min", type=int, default=2)
    p.add_argument("--n-max", dest="n_max", type=int, default=6)
    p.add_argument("--truncate", type=int, default=3)
    p.add_argument("--include-full", dest="include_full", default="never",
                   choices=("never", "auto", "always"))
    p.add_argument("--depth", type=int, default=2, help="depth for random-circuit")

    p = sub.add_parser("sync", help="classical tails and error-weight statistics")
    _add_common(p)
    p.add_argument("--p1", type=float, help="single-bit hit probability")
    p.add_argument("--p2", type=float, help="pair hit probability")
    p.add_argument("--n", type=int, help="number of bits for the tail")
    p.add_argument("--threshold", type=int, help="tail cut: P(hits > threshold)")
    p.add_argument("--p3", type=float, help="optional observed triple moment")
    p.add_argument("--channel", help="channel spec for the weight distribution")

    p = sub.add_parser("qec-demo", help="repetition code under randomizing noise")
    _add_common(p)
    p.add_argument("--epsilon", type=float, required=True, help="survival probability")
    p.add_argument("--logical", default="1,0", help="a,b amplitudes or zero/one/plus")

    p = sub.add_parser("run", help="run an experiment config file")
    _add_common(p)
    p.add_argument("--config", required=True, help="path to a JSON config")
    return parser


def _dispatch(args, seeds: SeedStream):
    command = args.command
    if command == "measure":
        params = {
            "name": args.name,
            "state": load_spec(args.state, "state"),
            "channel": load_spec(args.channel, "channel"),
            "qubits": args.qubits,
            "truncate": args.truncate,
            "include_full": args.include_full,
            "restarts": args.restarts,
            "sweeps": args.sweeps,
        }
        config = {"command": command, "seed": seeds.root, **params}
        return config, measure_results(params, seeds)
    if command == "relation":
        params = {
            "id": args.id,
            "level": args.level,
            "state": load_spec(args.state, "state"),
            "channel": load_spec(args.channel, "channel"),
            "qubits": args.qubits,
            "restarts": args.restarts,
            "sweeps": args.sweeps,
        }
        config = {"command": command, "seed": seeds.root, **params}
        return config, relation_results(params, seeds)
    if command == "censorship":
        params = {
            "family": args.family,
            "n_min": args.n_min,
            "n_max": args.n_max,
            "truncate": args.truncate,
            "include_full": args.include_full,
            "depth": args.depth,
        }
        config = {"command": command, "seed": seeds.root, **params}
        return config, censorship_results(params, seeds)
    if command == "sync":
        params = {
            "p1": args.p1,
            "p2": args.p2,
            "n": args.n,
            "threshold": args.threshold,
            "p3": args.p3,
            "channel": load_spec(args.channel, "channel"),
        }
        config = {"command": command, "seed": seeds.root, **params}
        return config, sync_results(params, seeds)
    if command == "qec-demo":
        params = {"epsilon": args.epsilon, "logical": args.logical}
        config = {"command": command, "seed": seeds.root, **params}
        return config, qec_results(params, seeds)
    if command == "run":
        try:
            with open(args.config, encoding="utf-8") as fh:
                config_body = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", field="config")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}", field="config")
        if not isinstance(config_body, dict):
            raise ConfigError("config must be a JSON object", field="config")
        if seeds.root is None and "seed" in config_body:
            seeds.root = int(config_body["seed"])
        config = {"command": command, "seed": seeds.root, **config_body}
        return config, run_experiment(config_body, seeds)
    raise ConfigError(f"unknown command {command!r}", field="command")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    seeds = SeedStream(getattr(args, "seed", None))
    try:
        config, results = _dispatch(args, seeds)
        report = assemble_report(config, results, seeds)
        fmt = getattr(args, "format", None)
        if args.command == "run" and fmt is None:
            fmt = config.get("format")
        text = render_csv(report) if fmt == "csv" else render_json(report)
    except ConfigError as exc:
        field = f" [{exc.field}]" if exc.field else ""
        print(f"config error{field}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = getattr(args, "out", None)
    if args.command == "run" and out is None:
        out = config.get("out")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
