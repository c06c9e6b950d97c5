'''
Temperature- and bias-dependent STT-MTJ compact model.

Every function accepts scalars or numpy arrays for voltages, currents and the
fields of a DeviceInstance, and broadcasts like numpy does.
'''
import math

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError, ModelError
from .params import SwitchDirection, ThermalParams

T_TOL = 1e-9

# median-switch-time search window and tolerance (s)
T_SEARCH_MIN = 1e-12
T_SEARCH_MAX = 1e-6
T_SEARCH_TOL = 1e-12


def interpolate_thermal(params, T):
    '''
    Material parameters at temperature T.

    Args:
        params (DeviceParams): device description.
        T (float): temperature in kelvin, within the table range.

    Returns:
        ThermalParams: P, M_S and K_i piecewise-linear through the table rows,
        TMR0 linear through the two anchors.

    Raises:
        DomainError: if T lies outside the table; no extrapolation is done.
    '''
    if not (params.t_min - T_TOL <= T <= params.t_max + T_TOL):
        raise DomainError('T = {} K outside [{}, {}] K'.format(T, params.t_min, params.t_max))
    temps, pols, mags, anis = zip(*params.temp_table)
    (T1, tmr1), (T2, tmr2) = params.tmr0_anchors
    tmr0 = tmr1 + (tmr2 - tmr1) * (T - T1) / (T2 - T1)
    return ThermalParams(float(np.interp(T, temps, pols)),
                         float(np.interp(T, temps, mags)),
                         float(np.interp(T, temps, anis)),
                         tmr0)


def resistance_parallel(params, inst):
    '''
    Parallel-state (bit 1) resistance. Independent of bias and temperature.
    '''
    return params.RA / inst.area * np.exp(params.c_tox * (inst.t_OX - params.t_OX_nom))


def tmr(params, V, T):
    '''
    Bias-dependent TMR ratio, halved at |V| = V_H.
    '''
    tmr0 = interpolate_thermal(params, T).TMR0
    return tmr0 / (1.0 + (np.asarray(V, dtype=float) / params.V_H) ** 2)


def resistance(params, state, V, T, inst):
    '''
    Resistance of a device storing `state` (1 = parallel, 0 = antiparallel)
    under bias V at temperature T.
    '''
    r_low = resistance_parallel(params, inst)
    if state == 1:
        return r_low * np.ones_like(np.asarray(V, dtype=float))
    if state == 0:
        return r_low * (1.0 + tmr(params, V, T))
    raise ValueError('state must be 0 or 1, got {}'.format(state))


def h_k_eff(params, T, inst=None):
    '''
    Effective perpendicular anisotropy field in A/m: the interface anisotropy
    field minus N_eff times the demagnetizing field. The instance geometry
    does not enter, so inst may be omitted.

    Raises:
        ModelError: if the result is negative (easy-plane regime).
    '''
    thermal = interpolate_thermal(params, T)
    mu0 = params.physics.mu0
    m_s = thermal.M_S / mu0
    h_k = 2.0 * thermal.K_i / (mu0 * m_s * params.t_FL) - params.N_eff * m_s
    if h_k < 0:
        raise ModelError('easy-plane regime: H_k,eff = {:.4g} A/m at T = {} K, N_eff = {}'
                         .format(h_k, T, params.N_eff))
    return h_k


def thermal_stability(params, T, inst):
    '''
    Thermal stability factor of the free layer.
    '''
    thermal = interpolate_thermal(params, T)
    volume = inst.area * params.t_FL
    # mu0 * M_s is the Tesla-valued table entry
    return thermal.M_S * h_k_eff(params, T, inst) * volume / (2.0 * params.physics.kB * T)


def spin_efficiency(P, direction):
    '''
    Slonczewski g_STT at theta = pi (AP_to_P) or theta = 0 (P_to_AP).
    '''
    if direction is SwitchDirection.AP_TO_P:
        return P / (2.0 * (1.0 - P ** 2))
    return P / (2.0 * (1.0 + P ** 2))


def critical_current(params, T, direction, inst):
    '''
    Critical switching current in amperes for the given direction.
    '''
    thermal = interpolate_thermal(params, T)
    phys = params.physics
    volume = inst.area * params.t_FL
    numerator = params.alpha * phys.e * phys.gamma * thermal.M_S * h_k_eff(params, T, inst) * volume
    return params.k_ic * numerator / (phys.muB * spin_efficiency(thermal.P, direction))


def _regimes(params, I, t, T, direction, inst):
    # shared pieces of the two-regime model: (p_thermal, wer_thermal, wer_prec, supercritical)
    I = np.asarray(I, dtype=float)
    t = np.asarray(t, dtype=float)
    delta = thermal_stability(params, T, inst)
    i = np.maximum(I, 0.0) / critical_current(params, T, direction, inst)

    tau = params.physics.tau0 * np.exp(delta * (1.0 - np.minimum(i, 1.0)))
    p_thermal = -np.expm1(-t / tau)
    wer_thermal = np.exp(-t / tau)

    phys = params.physics
    mu0_hk = phys.mu0 * h_k_eff(params, T, inst)
    excess = np.maximum(i - 1.0, 0.0)
    rate = params.k_w * params.alpha * phys.gamma * mu0_hk * excess / (1.0 + params.alpha ** 2)
    wer_prec = -np.expm1(-(math.pi ** 2 * delta / 4.0) * np.exp(-2.0 * t * rate))
    return p_thermal, wer_thermal, wer_prec, i > 1.0


def switching_probability(params, I, t, T, direction, inst):
    '''
    Probability that a pulse of current I (destabilizing magnitude, A) and
    width t (s) switches the free layer.

    Below I_c the barrier is crossed thermally (Neel-Arrhenius with a linearly
    reduced barrier); above I_c the precessional write error rate applies. The
    result is clamped to be non-decreasing in I: above I_c it is the larger of
    the precessional value and the thermal value at I = I_c. Negative currents
    stabilize the stored state and give exactly 0.
    '''
    p_thermal, _, wer_prec, supercritical = _regimes(params, I, t, T, direction, inst)
    p = np.where(supercritical, np.maximum(p_thermal, 1.0 - wer_prec), p_thermal)
    p = np.where(np.asarray(I) < 0, 0.0, p)
    p = np.clip(p, 0.0, 1.0)
    return float(p) if p.ndim == 0 else p


def write_error_rate(params, I, t, T, direction, inst):
    '''
    1 - switching_probability, computed directly so that rates far below
    machine epsilon relative to 1 keep their precision.
    '''
    _, wer_thermal, wer_prec, supercritical = _regimes(params, I, t, T, direction, inst)
    wer = np.where(supercritical, np.minimum(wer_thermal, wer_prec), wer_thermal)
    wer = np.where(np.asarray(I) < 0, 1.0, wer)
    wer = np.clip(wer, 0.0, 1.0)
    return float(wer) if wer.ndim == 0 else wer


def median_switch_time(params, I, T, direction, inst):
    '''
    Pulse width at which the switching probability reaches 0.5, or None if a
    1 us pulse does not get there.
    '''
    def excess(t):
        return switching_probability(params, I, t, T, direction, inst) - 0.5

    if excess(T_SEARCH_MAX) < 0:
        return None
    if excess(T_SEARCH_MIN) >= 0:
        return T_SEARCH_MIN
    return bisect(excess, T_SEARCH_MIN, T_SEARCH_MAX, xtol=T_SEARCH_TOL)


def julliere_tmr(P):
    '''Julliere estimate 2P^2/(1-P^2); informative cross-check only.'''
    return 2.0 * P ** 2 / (1.0 - P ** 2)
