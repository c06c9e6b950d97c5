'''
Seeded Monte Carlo over device geometry, Gaussian summaries of V_G, read
margins, reference voltage and bit error rates.
'''
from collections import namedtuple
from functools import lru_cache
import math

import numpy as np
from scipy.optimize import bisect
from scipy.special import erfc

from .circuit import solve_read
from .errors import ConfigError, ModelError
from .params import DeviceInstance

TRUNCATION = 4.0  # geometry samples are kept within +-4 sigma
VREF_TOL = 1e-6  # V
MIN_TRIALS = 100

COMBOS = ((0, 0), (0, 1), (1, 0), (1, 1))

GaussianSummary = namedtuple('GaussianSummary', ['mu', 'sigma', 'n'])

BerReport = namedtuple('BerReport', ['V_REF', 'balanced_ber', 'worst_ber_00', 'worst_ber_neq',
                                     'ber_11', 'worst_ber_11'])


@lru_cache(maxsize=64)
def _device_key(master_seed, device):
    return tuple(int(k) for k in np.random.SeedSequence(master_seed, spawn_key=(device,)).generate_state(2, np.uint64))


class RngSpec(namedtuple('_RngSpec', ['master_seed'])):
    '''
    Counter-based random streams. The (trial, device) pair selects a Philox
    counter block under a key derived from (master_seed, device), so every
    sample depends only on its indices and not on evaluation order.
    '''

    def substream(self, trial, device):
        key = _device_key(int(self.master_seed), int(device))
        bit_generator = np.random.Philox(key=key[0] | (key[1] << 64), counter=int(trial))
        return np.random.Generator(bit_generator)


def _truncated_normal(generator, mean, sigma):
    if sigma == 0:
        return mean
    while True:
        z = generator.standard_normal()
        if abs(z) <= TRUNCATION:
            return mean + sigma * z


def sample_instance(rng, trial, device, params):
    '''
    Draws the oxide thickness and cross-section of one device in one trial.
    '''
    generator = rng.substream(trial, device)
    t_ox = _truncated_normal(generator, params.t_OX_nom, params.sigma_tox_rel * params.t_OX_nom)
    area = _truncated_normal(generator, params.area_nom, params.sigma_area_rel * params.area_nom)
    return DeviceInstance(float(t_ox), float(area))


def sample_instances(rng, N, device, params):
    '''
    Batch of trials 0..N-1 for one device index, as a DeviceInstance of arrays.
    '''
    draws = [sample_instance(rng, trial, device, params) for trial in range(N)]
    return DeviceInstance(np.array([d.t_OX for d in draws]), np.array([d.area for d in draws]))


def summarize(samples):
    '''Two-pass mean and (n-1)-normalized standard deviation.'''
    samples = np.asarray(samples, dtype=float)
    if np.all(samples == samples[0]):
        return GaussianSummary(float(samples[0]), 0.0, int(samples.size))
    mu = float(np.mean(samples))
    sigma = float(np.sqrt(np.sum((samples - mu) ** 2) / (samples.size - 1)))
    return GaussianSummary(mu, sigma, int(samples.size))


def sample_read_voltages(params, combo, op, N, rng, insts=None):
    '''
    V_G of every trial of a READ campaign. Devices P and Q use device indices
    0 and 1, so campaigns for different combos share their geometry.
    '''
    if N < MIN_TRIALS:
        raise ConfigError('a read campaign needs at least {} trials, got {}'.format(MIN_TRIALS, N))
    if insts is None:
        insts = (sample_instances(rng, N, 0, params), sample_instances(rng, N, 1, params))
    return np.asarray(solve_read(params, combo, op, insts).V_G)


def run_read_mc(params, combo, op, N, rng, insts=None):
    return summarize(sample_read_voltages(params, combo, op, N, rng, insts))


def read_campaign(params, op, N, rng, insts=None):
    '''
    Runs the four input combinations on one shared instance set.

    Returns:
        dict: combo -> V_G array, plus the pooled 'neq' population under key None.
    '''
    if insts is None:
        insts = (sample_instances(rng, N, 0, params), sample_instances(rng, N, 1, params))
    voltages = {combo: sample_read_voltages(params, combo, op, N, rng, insts) for combo in COMBOS}
    voltages[None] = np.concatenate([voltages[(0, 1)], voltages[(1, 0)]])
    return voltages


def campaign_summaries(voltages):
    '''(00, P!=Q, 11) summaries of a read_campaign result.'''
    return summarize(voltages[(0, 0)]), summarize(voltages[None]), summarize(voltages[(1, 1)])


def q_function(z):
    '''Upper tail of the standard Gaussian.'''
    value = 0.5 * erfc(np.asarray(z, dtype=float) / math.sqrt(2.0))
    return float(value) if np.ndim(value) == 0 else value


def _tail(distance, sigma):
    # probability that a Gaussian sample falls `distance` beyond its mean
    if sigma == 0:
        return 0.0 if distance > 0 else (0.5 if distance == 0 else 1.0)
    return q_function(distance / sigma)


def read_margins(sum00, sum_neq):
    '''
    Returns:
        tuple: (RM_nom, RM_3sigma) in volts.
    '''
    rm_nom = sum_neq.mu - sum00.mu
    return rm_nom, rm_nom - 3.0 * (sum_neq.sigma + sum00.sigma)


def evaluate_vref(sum00, sum_neq, V_REF, delta_ref=0.0, sum11=None):
    '''
    Error rates of the comparator for a given V_REF. The worst-case entries
    shift V_REF by delta_ref toward each population.
    '''
    ber_00 = _tail(V_REF - sum00.mu, sum00.sigma)
    ber_neq = _tail(sum_neq.mu - V_REF, sum_neq.sigma)
    ber_11 = worst_11 = None
    if sum11 is not None:
        ber_11 = _tail(sum11.mu - V_REF, sum11.sigma)
        worst_11 = _tail(sum11.mu - V_REF - delta_ref, sum11.sigma)
    return BerReport(V_REF, max(ber_00, ber_neq),
                     _tail(V_REF - delta_ref - sum00.mu, sum00.sigma),
                     _tail(sum_neq.mu - V_REF - delta_ref, sum_neq.sigma),
                     ber_11, worst_11)


def equal_ber_vref(sum00, sum_neq, delta_ref=0.0, sum11=None):
    '''
    V_REF at which the 00 and P!=Q populations are misclassified with the same
    probability, found by bisection between the two means.
    '''
    if not sum00.mu < sum_neq.mu:
        raise ModelError('the 00 population must lie below the P!=Q population')
    if sum00.sigma == 0 or sum_neq.sigma == 0:
        report = evaluate_vref(sum00, sum_neq, 0.5 * (sum00.mu + sum_neq.mu), delta_ref, sum11)
        return report._replace(balanced_ber=0.0)

    def imbalance(v):
        return q_function((v - sum00.mu) / sum00.sigma) - q_function((sum_neq.mu - v) / sum_neq.sigma)

    v_ref = bisect(imbalance, sum00.mu, sum_neq.mu, xtol=VREF_TOL)
    report = evaluate_vref(sum00, sum_neq, v_ref, delta_ref, sum11)
    return report._replace(balanced_ber=q_function((v_ref - sum00.mu) / sum00.sigma))
