'''
Nonlinear node solver for the SIMPLY cell and per-operation energy integration.
'''
from collections import namedtuple

import numpy as np

from .device import median_switch_time, resistance, switching_probability, write_error_rate
from .errors import SolverError
from .params import SwitchDirection

DAMPING = 0.5
TOLERANCE = 1e-9  # V, KCL residual at convergence
MAX_ITERATIONS = 200

NodeSolution = namedtuple('NodeSolution', ['V_G', 'V_MTJ', 'I', 'R', 'iterations', 'residual'])
NodeSolution.__doc__ = '''
Converged node voltage V_G plus per-device tuples of V_MTJ, current and resistance.
Values are arrays when the devices carry a batch of trials.
'''


class EnergyBreakdown(namedtuple('_EnergyBreakdown', ['E_read', 'E_set', 'E_false', 'E_comp', 'total'])):
    '''
    Energy of one gate execution in joules.
    '''

    @classmethod
    def build(cls, E_read=0.0, E_set=0.0, E_false=0.0, E_comp=0.0):
        return cls(E_read, E_set, E_false, E_comp, E_read + E_set + E_false + E_comp)


def _solve_node(params, states, drives, op, insts):
    '''
    Damped fixed-point solution of Σ (V_k - V_G)/R_k(V_k - V_G) = V_G/R_G.
    '''
    T, R_G = op.T, op.R_G

    def update(v_g):
        rs = [resistance(params, s, v - v_g, T, inst) for s, v, inst in zip(states, drives, insts)]
        conductance = sum(1.0 / r for r in rs)
        target = sum(v / r for v, r in zip(drives, rs)) / (1.0 / R_G + conductance)
        # KCL residual expressed in volts across R_G
        residual = (v_g - target) * (1.0 + R_G * conductance)
        return target, residual, rs

    shapes = [np.shape(field) for inst in insts for field in inst]
    v_g = np.zeros(np.broadcast_shapes(*shapes))
    for iteration in range(1, MAX_ITERATIONS + 1):
        target, residual, rs = update(v_g)
        worst = float(np.max(np.abs(residual)))
        if worst <= TOLERANCE:
            break
        v_g = v_g + DAMPING * (target - v_g)
    else:
        trial = int(np.argmax(np.abs(residual))) if np.ndim(residual) else None
        raise SolverError('node solver did not converge in {} iterations (residual {:.3g} V)'
                          .format(MAX_ITERATIONS, worst), residual=worst, trial=trial)

    v_mtj = tuple(v - v_g for v in drives)
    currents = tuple(vm / r for vm, r in zip(v_mtj, rs))
    if np.ndim(v_g) == 0:
        v_g = float(v_g)
        v_mtj = tuple(float(v) for v in v_mtj)
        currents = tuple(float(i) for i in currents)
        rs = [float(r) for r in rs]
    return NodeSolution(v_g, v_mtj, currents, tuple(rs), iteration, worst)


def solve_read(params, states, op, insts):
    '''
    READ phase: V_READ on both top electrodes, devices sharing R_G.

    Args:
        params (DeviceParams): device description.
        states (tuple): stored bits of (P, Q).
        op (OperatingPoint): bias point.
        insts (tuple): DeviceInstance of P and Q (scalars or batches).

    Returns:
        NodeSolution with per-device entries ordered (P, Q).
    '''
    return _solve_node(params, tuple(states), (op.V_READ, op.V_READ), op, tuple(insts))


def solve_single(params, state, V_drive, op, inst):
    '''
    One driven device in series with R_G, the other driver in HI-Z. A negative
    V_drive reverses the device bias (FALSE).
    '''
    if V_drive == 0:
        raise ValueError('V_drive must be non-zero')
    return _solve_node(params, (state,), (V_drive,), op, (inst,))


def gate_rdr(params, states, op, insts, solution=None):
    '''
    Probability that READ flips at least one stored bit. Only devices holding
    0 are destabilized by the positive READ bias.
    '''
    sol = solution if solution is not None else solve_read(params, states, op, insts)
    log_keep = 0.0
    for state, current, inst in zip(states, sol.I, insts):
        if state == 0:
            p = switching_probability(params, current, op.t_READ, op.T, SwitchDirection.AP_TO_P, inst)
            with np.errstate(divide='ignore'):
                log_keep = log_keep + np.log1p(-p)
    rdr = -np.expm1(log_keep)
    return float(rdr) if np.ndim(rdr) == 0 else rdr


def set_wer(params, op, inst):
    '''
    Write error rate of the SET pulse on Q = 0, at the pre-switch current.
    '''
    pre = solve_single(params, 0, op.V_SET, op, inst)
    return write_error_rate(params, pre.I[0], op.t_SET, op.T, SwitchDirection.AP_TO_P, inst)


def energy_read(solution, op):
    return op.V_READ * sum(solution.I) * op.t_READ


def _two_phase_energy(params, V_drive, width, start_state, direction, op, inst):
    # piecewise-constant current: pre-switch until the median switch time, post-switch after it
    if width <= 0:
        return 0.0
    pre = solve_single(params, start_state, V_drive, op, inst)
    i_pre = abs(pre.I[0])
    destabilizing = (V_drive > 0) == (direction is SwitchDirection.AP_TO_P)
    t_switch = median_switch_time(params, i_pre, op.T, direction, inst) if destabilizing else None
    if t_switch is None or t_switch >= width:
        return abs(V_drive) * i_pre * width
    post = solve_single(params, 1 - start_state, V_drive, op, inst)
    return abs(V_drive) * (i_pre * t_switch + abs(post.I[0]) * (width - t_switch))


def energy_set(params, op, inst):
    '''
    Energy of the SET pulse on Q = 0 (AP to P).
    '''
    return _two_phase_energy(params, op.V_SET, op.t_SET, 0, SwitchDirection.AP_TO_P, op, inst)


def energy_false(params, op, inst, state=1):
    '''
    Energy of the negative V_RESET pulse driving a device storing `state` to 0.
    A device already at 0 sees a stabilizing current for the whole pulse.
    '''
    if state == 0:
        if op.t_RESET <= 0:
            return 0.0
        sol = solve_single(params, 0, op.V_RESET, op, inst)
        return abs(op.V_RESET) * abs(sol.I[0]) * op.t_RESET
    return _two_phase_energy(params, op.V_RESET, op.t_RESET, 1, SwitchDirection.P_TO_AP, op, inst)
