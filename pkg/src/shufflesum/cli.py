"""Command-line front end: plan message counts, simulate protocol runs,
and verify the measured quantities against the closed-form bounds.

Exit codes: 0 all checks pass, 1 a verified bound is violated, 2 invalid
or over-budget parameters. Seeds are always explicit in the output; a
seed that was not supplied is generated once and recorded.
"""

from __future__ import annotations

import csv
import io
import json
import secrets
import sys

import click

from . import __version__
from .group import Modulus, group_sum, uniform_element
from .oracle import (
    CollisionMode,
    exact_avg_case_tv,
    exact_collision_probability,
    hoeffding_halfwidth,
    lemma1_bound,
    verify_chain,
)
from .planner import baseline_k_lower_bound, plan_shuffled_k, validate_params
from .protocol import Variant, aggregate, run_ikos, run_ikos_randomized, transcript_to_dict
from .randgraph import (
    EnumerationBudgetError,
    estimate_component_distribution,
    estimate_m_power_C,
    expectation_bound,
    lemma4_probability_bound,
)
from .rng import derive_seed, stream

EXIT_VIOLATION = 1


def _resolve_m(m: int | None, m_bits: int | None) -> int:
    if (m is None) == (m_bits is None):
        raise click.UsageError("specify exactly one of --m or --m-bits")
    if m_bits is not None:
        if m_bits < 1:
            raise click.UsageError("--m-bits must be >= 1")
        return 2**m_bits
    return m


def _resolve_seed(seed: int | None) -> int:
    return seed if seed is not None else secrets.randbits(32)


def _flatten(prefix: str, value, out: dict) -> None:
    if isinstance(value, dict):
        for key, sub in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), sub, out)
    elif isinstance(value, (list, tuple)):
        for i, sub in enumerate(value):
            _flatten(f"{prefix}.{i}", sub, out)
    else:
        out[prefix] = value


def emit_report(report: dict, fmt: str) -> None:
    """Print a report as a table, JSON, or key,value CSV.

    The CSV rows are the flattened (dotted-key) fields of the JSON object,
    so the two formats carry identical data field-for-field.
    """
    if fmt == "json":
        click.echo(json.dumps(report, sort_keys=True, indent=2))
        return
    flat: dict = {}
    _flatten("", report, flat)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key in sorted(flat):
            value = flat[key]
            writer.writerow([key, json.dumps(value) if value is not None else ""])
        click.echo(buf.getvalue(), nl=False)
        return
    width = max((len(k) for k in flat), default=0)
    for key in sorted(flat):
        click.echo(f"{key:<{width}}  {flat[key]}")


_FORMAT = click.option(
    "--format",
    "fmt",
    type=click.Choice(["table", "json", "csv"]),
    default="table",
    show_default=True,
    help="Output format.",
)


@click.group()
@click.version_option(version=__version__, prog_name="shufflesum")
def main() -> None:
    """Split-and-mix secure summation: planning, simulation, verification."""


@main.command()
@click.option("--sigma", type=float, required=True, help="Target security exponent (bits).")
@click.option("--n", type=int, required=True, help="Number of users.")
@click.option("--m", type=int, default=None, help="Group size.")
@click.option("--m-bits", type=int, default=None, help="Group size as 2**bits.")
@_FORMAT
def plan(sigma: float, n: int, m: int | None, m_bits: int | None, fmt: str) -> None:
    """Minimal messages per user for a target security level."""
    m_val = _resolve_m(m, m_bits)
    try:
        result = plan_shuffled_k(sigma, n, m_val)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    report = {
        "version": __version__,
        "params": {"sigma": sigma, "n": n, "m": m_val},
        "k_shuffled": result.k_shuffled,
        "total_messages": result.total_messages,
        "achieved_sigma": result.achieved_sigma,
        "baseline_k_lower_bound": baseline_k_lower_bound(sigma),
        "preconditions_ok": result.preconditions_ok,
    }
    emit_report(report, fmt)


@main.command()
@click.option("--n", type=int, required=True, help="Number of users.")
@click.option("--k", type=int, required=True, help="Shuffled shares per user.")
@click.option("--m", type=int, default=None, help="Group size.")
@click.option("--m-bits", type=int, default=None, help="Group size as 2**bits.")
@click.option(
    "--variant",
    type=click.Choice([v.value for v in Variant]),
    default=Variant.PLAIN.value,
    show_default=True,
)
@click.option("--seed", type=int, default=None, help="Base seed (generated and printed if omitted).")
@click.option("--runs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write transcripts (JSON lines) here instead of stdout.")
def simulate(n, k, m, m_bits, variant, seed, runs, out) -> None:
    """Run the protocol and record transcripts plus conservation checks."""
    m_val = _resolve_m(m, m_bits)
    if n < 1 or k < 1 or runs < 1:
        raise click.UsageError("need n >= 1, k >= 1, runs >= 1")
    try:
        mod = Modulus(m_val)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    seed = _resolve_seed(seed)
    run = run_ikos if variant == Variant.PLAIN.value else run_ikos_randomized
    lines = []
    failures = 0
    for r in range(runs):
        run_seed = derive_seed(seed, r)
        rng = stream(seed, r)
        inputs = [uniform_element(rng, mod) for _ in range(n)]
        transcript = run(inputs, k, mod, rng)
        expected = group_sum(inputs, mod)
        got = aggregate(transcript, mod)
        conserved = got == expected
        failures += not conserved
        lines.append(json.dumps(transcript_to_dict(transcript, mod, run_seed), sort_keys=True))
        click.echo(
            f"run {r}: input_sum={expected} aggregate={got} "
            f"conserved={'yes' if conserved else 'NO'}",
            err=True,
        )
    payload = "\n".join(lines) + "\n"
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
        click.echo(f"wrote {runs} transcript(s) to {out}", err=True)
    else:
        click.echo(payload, nl=False)
    click.echo(f"seed={seed}", err=True)
    if failures:
        click.echo(f"{failures} conservation check(s) FAILED", err=True)
        sys.exit(EXIT_VIOLATION)


@main.group()
def verify() -> None:
    """Check measured quantities against the closed-form bounds."""


@verify.command("graph-dist")
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--shards", type=int, default=1, show_default=True)
@_FORMAT
def verify_graph_dist(n, k, samples, seed, shards, fmt) -> None:
    """Empirical component-count law vs its closed-form bound."""
    if n < 1 or k < 1 or samples < 1 or shards < 1:
        raise click.UsageError("need n, k, samples, shards >= 1")
    seed = _resolve_seed(seed)
    hist = estimate_component_distribution(n, k, samples, seed, shards)
    halfwidth = hoeffding_halfwidth(samples)
    rows = {}
    violations = []
    for c, count in hist.counts.items():
        bound = lemma4_probability_bound(n, k, c, warn=False)
        freq = count / samples
        ok = freq <= bound + halfwidth
        rows[str(c)] = {"count": count, "frequency": freq, "lemma4_bound": bound, "ok": ok}
        if not ok:
            violations.append(c)
    report = {
        "version": __version__,
        "params": {"n": n, "k": k},
        "samples": samples,
        "seed": seed,
        "shards": shards,
        "hoeffding_halfwidth": halfwidth,
        "components": rows,
        "violations": violations,
    }
    emit_report(report, fmt)
    if violations:
        sys.exit(EXIT_VIOLATION)


@verify.command("graph-exp")
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--m", type=int, default=None)
@click.option("--m-bits", type=int, default=None)
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--shards", type=int, default=1, show_default=True)
@_FORMAT
def verify_graph_exp(n, k, m, m_bits, samples, seed, shards, fmt) -> None:
    """Monte Carlo E[m^C] vs its closed-form bound."""
    m_val = _resolve_m(m, m_bits)
    if n < 1 or k < 1 or samples < 1 or shards < 1:
        raise click.UsageError("need n, k, samples, shards >= 1")
    try:
        bound = expectation_bound(n, k, m_val)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    seed = _resolve_seed(seed)
    estimate, halfwidth = estimate_m_power_C(n, k, m_val, samples, seed, shards)
    ok = estimate - halfwidth <= bound
    report = {
        "version": __version__,
        "params": {"n": n, "k": k, "m": m_val},
        "samples": samples,
        "seed": seed,
        "shards": shards,
        "estimate": estimate,
        "ci99_halfwidth": halfwidth,
        "expectation_bound": bound,
        "ok": ok,
    }
    emit_report(report, fmt)
    if not ok:
        sys.exit(EXIT_VIOLATION)


@verify.command("tv-exact")
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--m", type=int, default=None)
@click.option("--m-bits", type=int, default=None)
@_FORMAT
def verify_tv_exact(n, k, m, m_bits, fmt) -> None:
    """Exact average TV vs the exact collision-probability bound."""
    m_val = _resolve_m(m, m_bits)
    if n < 1 or k < 1 or m_val < 1:
        raise click.UsageError("need n, k, m >= 1")
    try:
        tv = exact_avg_case_tv(n, k, m_val)
        collision = exact_collision_probability(n, k, m_val, CollisionMode.V_VS_V)
    except EnumerationBudgetError as exc:
        raise click.UsageError(str(exc)) from exc
    radicand = collision * m_val ** (k * n - 1) - 1
    sound = tv * tv <= radicand
    bound = lemma1_bound(collision, n, k, m_val) if m_val >= 2 else None
    report = {
        "version": __version__,
        "params": {"n": n, "k": k, "m": m_val},
        "exact_avg_tv": {"fraction": f"{tv.numerator}/{tv.denominator}", "value": float(tv)},
        "exact_collision": {
            "fraction": f"{collision.numerator}/{collision.denominator}",
            "value": float(collision),
        },
        "lemma1_bound": None if bound is None else {"value": bound.value, "status": bound.status},
        "ok": sound,
    }
    emit_report(report, fmt)
    if not sound:
        sys.exit(EXIT_VIOLATION)


@verify.command("chain")
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--m", type=int, default=None)
@click.option("--m-bits", type=int, default=None)
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--shards", type=int, default=1, show_default=True)
@_FORMAT
def verify_chain_cmd(n, k, m, m_bits, samples, seed, shards, fmt) -> None:
    """Full bound-chain report: exact where enumerable, Monte Carlo always."""
    m_val = _resolve_m(m, m_bits)
    if n < 1 or k < 1 or m_val < 2 or samples < 1 or shards < 1:
        raise click.UsageError("need n, k >= 1, m >= 2, samples, shards >= 1")
    seed = _resolve_seed(seed)
    report = verify_chain(n, k, m_val, samples, seed, shards)
    payload = {"version": __version__, **report.to_dict()}
    emit_report(payload, fmt)
    if not report.all_checks_pass():
        sys.exit(EXIT_VIOLATION)


if __name__ == "__main__":
    main()
