"""Command-line front end.

Every subcommand reads a building document (or a trace CSV), computes,
and only then writes its full output — to stdout or to ``--out`` — so a
failing run never leaves a partial file behind.  All output is plain
CSV/text with shortest-round-trip floats: identical arguments and
inputs give byte-identical output.

Exit codes: 0 success, 2 usage, 3 malformed input, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .conductance import conductance_report, overall_H_multizone, reference_H_single, static_gains
from .doe import (DesignConstraints, default_axes, grid_to_csv, select_optimum,
                  sweep)
from .error_budget import ErrorPolicy
from .exceptions import ModelError, NumericalError, SchemaError
from .modal import classify_modes, initial_state, modal_decomposition
from .network import (StateSpaceModel, ThermalCircuit, parse_building,
                      to_state_space, zone_heat_inputs)
from .qub import QubProtocol, estimate_from_trace, simulate_qub, trace_from_csv, trace_to_csv

_R = repr  # shortest round-trip float rendering


def _fmt(x: float) -> str:
    return _R(float(x))


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _range_spec(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected A:B:N, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B:N, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("N must be >= 1")
    return lo, hi, n


def _assignment(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}") from None


def _add_protocol_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--to", type=float, default=0.0, metavar="C",
                   help="outdoor temperature (default 0)")
    p.add_argument("--p0", type=float, default=0.0, metavar="W",
                   help="pre-experiment power (default 0)")
    p.add_argument("--ph", type=float, default=1000.0, metavar="W",
                   help="heating power (default 1000)")
    p.add_argument("--pc", type=float, default=0.0, metavar="W",
                   help="cooling-phase power (default 0)")
    p.add_argument("--tqub", type=float, default=10800.0, metavar="S",
                   help="duration of each phase in seconds (default 10800)")
    p.add_argument("--window", type=float, default=1.0 / 3.0, metavar="F",
                   help="trailing fraction of each phase fitted (default 1/3)")
    p.add_argument("--dt", type=float, default=None, metavar="S",
                   help="sampling step (default t_qub/120)")
    p.add_argument("--set", dest="boundary", type=_assignment, action="append",
                   default=[], metavar="NAME=VALUE",
                   help="hold a named temperature source at a value other "
                        "than --to (repeatable)")


def _add_error_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps-dt", type=float, default=0.5, metavar="K",
                   help="temperature-difference uncertainty (default 0.5)")
    p.add_argument("--eps-p-rel", type=float, default=0.01, metavar="F",
                   help="power uncertainty as a fraction of P_h (default 0.01)")
    p.add_argument("--eps-alpha", type=float, default=None, metavar="K_PER_S",
                   help="slope uncertainty (default: from each fit's r²)")


def _add_out_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, metavar="PATH",
                   help="write the result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubdoe",
        description="Design two-pulse building heat-loss experiments on RC "
                    "network models.",
    )
    parser.add_argument("--version", action="version", version=f"qubdoe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a building document")
    p.add_argument("building", help="building JSON document")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("eig", help="time constants, modal amplitudes and classes")
    p.add_argument("building")
    _add_protocol_flags(p)
    _add_out_flag(p)
    p.set_defaults(func=_cmd_eig)

    p = sub.add_parser("gains", help="static gain matrix and overall H")
    p.add_argument("building")
    _add_protocol_flags(p)
    _add_out_flag(p)
    p.set_defaults(func=_cmd_gains)

    p = sub.add_parser("simulate", help="run the two-pulse protocol, emit a trace CSV")
    p.add_argument("building")
    _add_protocol_flags(p)
    _add_out_flag(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="fit a trace CSV and report H and C")
    p.add_argument("--trace", required=True, metavar="PATH", help="trace CSV")
    p.add_argument("--window", type=float, default=1.0 / 3.0, metavar="F",
                   help="trailing fraction of each phase fitted (default 1/3)")
    _add_out_flag(p)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("sweep", help="error map over a (P_h x t_qub) grid")
    p.add_argument("building")
    _add_protocol_flags(p)
    _add_error_flags(p)
    p.add_argument("--ph-range", type=_range_spec, default=None, metavar="A:B:N",
                   help="heating powers, N log-spaced points over [A, B] W "
                        "(default: maintenance power to 4x, 40 points)")
    p.add_argument("--t-range", type=_range_spec, default=None, metavar="A:B:N",
                   help="phase durations, N linear points over [A, B] s "
                        "(default: 1 h to 12 h, 40 points)")
    _add_out_flag(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("optimum", help="best admissible design of a sweep")
    p.add_argument("building")
    _add_protocol_flags(p)
    _add_error_flags(p)
    p.add_argument("--ph-range", type=_range_spec, default=None, metavar="A:B:N")
    p.add_argument("--t-range", type=_range_spec, default=None, metavar="A:B:N")
    p.add_argument("--max-power", type=float, default=None, metavar="W",
                   help="heater limit (default: top of the power axis)")
    p.add_argument("--max-temp", type=float, default=None, metavar="C",
                   help="peak indoor temperature limit (default: none)")
    p.add_argument("--max-duration", type=float, default=None, metavar="S",
                   help="whole-experiment limit, 2*t_qub (default: none)")
    _add_out_flag(p)
    p.set_defaults(func=_cmd_optimum)

    return parser


# ---------------------------------------------------------------------------
# shared model assembly
# ---------------------------------------------------------------------------

def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_circuit(path: str) -> ThermalCircuit:
    return parse_building(_read_text(path))


def _indoor_model(circuit: ThermalCircuit):
    """Model with indoor-temperature outputs plus the averaging and
    power-split weights (zone air masses when zones are declared)."""
    if circuit.zones:
        outputs = [z.air_node for z in circuit.zones]
        temp_weights = np.array([z.air_mass for z in circuit.zones])
        mass_at = {z.air_node: z.air_mass for z in circuit.zones}
        power_weights = np.array([mass_at.get(fs.node, 0.0)
                                  for fs in circuit.flow_sources])
        if power_weights.sum() <= 0.0:
            power_weights = None
    else:
        nodes_with_heat = []
        for fs in circuit.flow_sources:
            if fs.node not in nodes_with_heat:
                nodes_with_heat.append(fs.node)
        capacitive = [n.id for n in circuit.nodes if n.capacity > 0.0]
        outputs = nodes_with_heat or capacitive[:1]
        temp_weights = None
        power_weights = None
    model = to_state_space(circuit, outputs)
    return model, temp_weights, power_weights


def _protocol(args) -> QubProtocol:
    return QubProtocol(
        T_o=args.to, P0=args.p0, P_h=args.ph, P_c=args.pc, t_qub=args.tqub,
        slope_window_fraction=args.window, sample_dt=args.dt,
        boundary_temperatures=dict(args.boundary),
    )


def _reference_H(circuit: ThermalCircuit, model: StateSpaceModel, T_o: float) -> float:
    if len(circuit.zones) > 1:
        powers = {z.id: z.air_mass for z in circuit.zones}
        return overall_H_multizone(model, powers, T_o, circuit.zones,
                                   zone_inputs=zone_heat_inputs(circuit))
    if not model.flow_inputs:
        raise ModelError("building declares no heat-flow source")
    return reference_H_single(model, model.flow_inputs[0], model.output_names[0])


def _steady_mean_indoor(model, temp_weights, protocol: QubProtocol) -> float:
    """Mass-weighted mean indoor temperature of the pre-experiment state."""
    values = {name: protocol.boundary_temperatures.get(name, protocol.T_o)
              for name in model.temperature_inputs}
    n_flow = len(model.flow_inputs)
    for name in model.flow_inputs:
        values[name] = protocol.P0 / n_flow
    y = static_gains(model) @ model.input_vector(values)
    w = (np.full(len(y), 1.0 / len(y)) if temp_weights is None
         else np.asarray(temp_weights, dtype=float) / np.sum(temp_weights))
    return float(y @ w)


def _axes(args, circuit, model, temp_weights) -> tuple[np.ndarray, np.ndarray]:
    H_ref = _reference_H(circuit, model, args.to)
    if args.ph_range is None or args.t_range is None:
        theta0 = _steady_mean_indoor(model, temp_weights, _protocol(args))
        maintenance = H_ref * (theta0 - args.to)
        ph_default, t_default = default_axes(H_ref, maintenance)
    if args.ph_range is not None:
        lo, hi, n = args.ph_range
        if lo <= 0.0:
            raise ModelError("--ph-range: powers must be positive (log spacing)")
        ph_values = np.geomspace(lo, hi, n)
    else:
        ph_values = ph_default
    if args.t_range is not None:
        lo, hi, n = args.t_range
        if lo <= 0.0:
            raise ModelError("--t-range: durations must be positive")
        t_values = np.linspace(lo, hi, n)
    else:
        t_values = t_default
    return ph_values, t_values


def _run_sweep(args):
    circuit = _load_circuit(args.building)
    model, temp_weights, power_weights = _indoor_model(circuit)
    H_ref = _reference_H(circuit, model, args.to)
    ph_values, t_values = _axes(args, circuit, model, temp_weights)
    policy = ErrorPolicy(eps_dT=args.eps_dt, eps_P_rel=args.eps_p_rel,
                         eps_alpha=args.eps_alpha)
    template = _protocol(args)
    grid = sweep(model, template, ph_values, t_values, policy, H_ref,
                 temp_weights=temp_weights, power_weights=power_weights)
    return grid


# ---------------------------------------------------------------------------
# subcommands (each returns the full output text)
# ---------------------------------------------------------------------------

def _cmd_check(args) -> str:
    circuit = _load_circuit(args.building)
    return f"OK: {len(circuit.nodes)} nodes, {len(circuit.branches)} branches\n"


def _cmd_eig(args) -> str:
    circuit = _load_circuit(args.building)
    model, temp_weights, power_weights = _indoor_model(circuit)
    protocol = _protocol(args)
    n_flow = len(model.flow_inputs)
    if n_flow == 0:
        raise ModelError("building declares no heat-flow source")
    w_power = (np.full(n_flow, 1.0 / n_flow) if power_weights is None
               else np.asarray(power_weights, dtype=float) / np.sum(power_weights))
    temps = {name: protocol.boundary_temperatures.get(name, protocol.T_o)
             for name in model.temperature_inputs}
    u0 = model.input_vector({**temps, **{name: protocol.P0 * w
                                         for name, w in zip(model.flow_inputs, w_power)}})
    u_h = model.input_vector({**temps, **{name: protocol.P_h * w
                                          for name, w in zip(model.flow_inputs, w_power)}})
    decomp = modal_decomposition(model, u_h, initial_state(model, u0))
    labels = dict(classify_modes(decomp, protocol.t_qub))
    p = len(model.output_names)
    w_out = (np.full(p, 1.0 / p) if temp_weights is None
             else np.asarray(temp_weights, dtype=float) / np.sum(temp_weights))
    init_eq = w_out @ decomp.init_amplitudes
    input_eq = w_out @ decomp.input_amplitudes
    lines = ["mode_index,tau_s,lambda_per_s,init_amp,input_amp,class"]
    for i, lam in enumerate(decomp.eigenvalues):
        lines.append(",".join((
            str(i), _fmt(decomp.time_constants[i]), _fmt(lam),
            _fmt(init_eq[i]), _fmt(input_eq[i]), labels[i],
        )))
    return "\n".join(lines) + "\n"


def _cmd_gains(args) -> str:
    circuit = _load_circuit(args.building)
    model, temp_weights, power_weights = _indoor_model(circuit)
    if not model.flow_inputs:
        raise ModelError("building declares no heat-flow source")
    protocol_values = None
    if circuit.zones:
        n_flow = len(model.flow_inputs)
        w_power = (np.full(n_flow, 1.0 / n_flow) if power_weights is None
                   else np.asarray(power_weights, dtype=float) / np.sum(power_weights))
        protocol_values = {name: args.to for name in model.temperature_inputs}
        protocol_values.update({name: args.p0 * w
                                for name, w in zip(model.flow_inputs, w_power)})
    report = conductance_report(
        model, model.flow_inputs[0], model.output_names[0],
        source_values=protocol_values, zones=circuit.zones or None,
    )
    lines = ["record,output,input,value"]
    for i, out in enumerate(report.output_names):
        for j, inp in enumerate(report.input_names):
            lines.append(f"gain,{out},{inp},{_fmt(report.static_gain_matrix[i, j])}")
    for i, out in enumerate(report.output_names):
        lines.append(f"temp_gain_sum,{out},,{_fmt(report.temperature_gain_sums[i])}")
    lines.append(f"H,,,{_fmt(report.H)}")
    lines.append(f"R,,,{_fmt(report.R)}")
    if len(circuit.zones) > 1:
        H_multi = _reference_H(circuit, model, args.to)
        lines.append(f"H_multizone,,,{_fmt(H_multi)}")
    if report.mean_temperature is not None:
        lines.append(f"mean_temperature,,,{_fmt(report.mean_temperature)}")
    return "\n".join(lines) + "\n"


def _cmd_simulate(args) -> str:
    circuit = _load_circuit(args.building)
    model, temp_weights, power_weights = _indoor_model(circuit)
    trace = simulate_qub(model, _protocol(args), temp_weights=temp_weights,
                         power_weights=power_weights)
    return trace_to_csv(trace)


def _cmd_estimate(args) -> str:
    trace = trace_from_csv(_read_text(args.trace))
    est = estimate_from_trace(trace, window_fraction=args.window)
    header = "H_qub_W_per_K,C_star_J_per_K,C_J_per_K,alpha_h,alpha_c,r2_h,r2_c"
    row = ",".join(_fmt(v) for v in (est.H_qub, est.C_star, est.C,
                                     est.alpha_h, est.alpha_c, est.r2_h, est.r2_c))
    return header + "\n" + row + "\n"


def _cmd_sweep(args) -> str:
    return grid_to_csv(_run_sweep(args))


def _cmd_optimum(args) -> str:
    grid = _run_sweep(args)
    constraints = DesignConstraints(
        max_power=(args.max_power if args.max_power is not None
                   else float(np.max(grid.ph_values))),
        max_indoor_temperature=(args.max_temp if args.max_temp is not None
                                else float("inf")),
        max_total_duration=(args.max_duration if args.max_duration is not None
                            else 2.0 * float(np.max(grid.t_values))),
    )
    best = select_optimum(grid, constraints)
    return (f"ph_W={_fmt(best.ph)} t_qub_s={_fmt(best.t_qub)} "
            f"eps_H_pct={_fmt(best.eps_H_pct)}\n")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
        out = getattr(args, "out", None)
        if out is None:
            sys.stdout.write(text)
        else:
            # full text is ready before the file is touched
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except (SchemaError, ModelError) as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
