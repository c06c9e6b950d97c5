'''
Encapsulates the device, geometry and operating-point records shared by every module.
'''
from collections import namedtuple
from enum import Enum
import math

from .errors import ConfigError

# (T [K], P, M_S [T], K_i [J/m^2]) rows of the device parameter table
TEMP_TABLE = (
    (250.0, 0.68, 1.64, 1.41e-3),
    (300.0, 0.66, 1.58, 1.30e-3),
    (350.0, 0.64, 1.51, 1.18e-3),
)
# zero-bias TMR quoted at the two ends of the temperature range
TMR0_ANCHORS = ((250.0, 1.66), (350.0, 1.34))


class SwitchDirection(Enum):
    '''
    Free-layer transition driven by the current. AP_to_P writes bit 1 and is
    destabilized by positive top-electrode bias; P_to_AP writes bit 0.
    '''
    AP_TO_P = 'AP_to_P'
    P_TO_AP = 'P_to_AP'


class PhysicalConstants(namedtuple('_PhysicalConstants', ['mu0', 'kB', 'e', 'gamma', 'muB', 'tau0'],
                                   defaults=[4e-7 * math.pi, 1.380649e-23, 1.602176634e-19,
                                             1.76e11, 9.2740100783e-24, 1e-9])):
    '''
    SI constants entering the thermal stability and critical current expressions.
    '''

    def validate(self):
        for name, value in self._asdict().items():
            if not value > 0:
                raise ConfigError('physical constant {} must be positive, got {}'.format(name, value))
        return self


PHYSICS = PhysicalConstants()


class ThermalParams(namedtuple('_ThermalParams', ['P', 'M_S', 'K_i', 'TMR0'])):
    '''
    Temperature-dependent material parameters at one temperature.
    M_S is in Tesla (mu0 * M_s), K_i in J/m^2.
    '''


class DeviceInstance(namedtuple('_DeviceInstance', ['t_OX', 'area'])):
    '''
    One Monte Carlo sample of the oxide thickness (m) and cross-section (m^2).
    Fields may also be equal-length numpy arrays holding a batch of trials.
    '''

    @classmethod
    def nominal(cls, params):
        return cls(params.t_OX_nom, params.area_nom)

    def take(self, index):
        '''Returns the scalar instance of one trial out of a batch.'''
        return DeviceInstance(float(self.t_OX[index]), float(self.area[index]))


_DEVICE_FIELDS = ['d', 't_FL', 't_OX_nom', 'RA', 'V_H', 'alpha', 'temp_table', 'tmr0_anchors',
                  'sigma_tox_rel', 'sigma_area_rel', 'N_eff', 'k_ic', 'k_w', 'c_tox', 'E_comp',
                  'physics']

# calibrated against the reference-experiment anchors (see calibration.py)
_DEVICE_DEFAULTS = [30e-9, 1.15e-9, 0.85e-9, 10e-12, 0.5, 0.03, TEMP_TABLE, TMR0_ANCHORS,
                    0.01, 0.05, 0.915, 0.264, 1.0, 8.0e9, 42.2e-15, PHYSICS]

# fields a configuration file may override
DEVICE_SCALAR_FIELDS = ('d', 't_FL', 't_OX_nom', 'RA', 'V_H', 'alpha', 'sigma_tox_rel',
                        'sigma_area_rel', 'N_eff', 'k_ic', 'k_w', 'c_tox', 'E_comp')


class DeviceParams(namedtuple('_DeviceParams', _DEVICE_FIELDS, defaults=_DEVICE_DEFAULTS)):
    '''
    Physical and calibration parameters of the 30-nm perpendicular STT-MTJ.

    Geometry is in metres, RA in ohm*m^2 (10 ohm*um^2 = 10e-12), V_H in volts.
    N_eff, k_ic, k_w, c_tox and E_comp are the calibrated constants.
    '''

    @property
    def area_nom(self):
        return math.pi * self.d ** 2 / 4

    @property
    def t_min(self):
        return self.temp_table[0][0]

    @property
    def t_max(self):
        return self.temp_table[-1][0]

    def validate(self):
        '''
        Checks the invariants of the parameter set and returns it unchanged.
        '''
        for name in ('d', 't_FL', 't_OX_nom', 'RA', 'V_H', 'alpha'):
            if not getattr(self, name) > 0:
                raise ConfigError('{} must be positive, got {}'.format(name, getattr(self, name)))
        temps = [row[0] for row in self.temp_table]
        if len(temps) < 2 or any(b <= a for a, b in zip(temps, temps[1:])):
            raise ConfigError('temp_table temperatures must be strictly increasing')
        for T, P, M_S, K_i in self.temp_table:
            if not 0 < P < 1:
                raise ConfigError('spin polarization at {} K must lie in (0, 1), got {}'.format(T, P))
            if M_S <= 0 or K_i <= 0:
                raise ConfigError('M_S and K_i at {} K must be positive'.format(T))
        if not 0 < self.N_eff <= 1:
            raise ConfigError('N_eff must lie in (0, 1], got {}'.format(self.N_eff))
        for name in ('sigma_tox_rel', 'sigma_area_rel'):
            if not 0 <= getattr(self, name) <= 0.2:
                raise ConfigError('{} must lie in [0, 0.2], got {}'.format(name, getattr(self, name)))
        for name in ('k_ic', 'k_w'):
            if not getattr(self, name) > 0:
                raise ConfigError('{} must be positive'.format(name))
        if self.c_tox < 0 or self.E_comp < 0:
            raise ConfigError('c_tox and E_comp must be non-negative')
        self.physics.validate()
        return self

    def without_variation(self):
        return self._replace(sigma_tox_rel=0.0, sigma_area_rel=0.0)


_OPERATING_FIELDS = ['T', 'R_G', 'V_READ', 't_READ', 'V_SET', 't_SET', 'V_RESET', 't_RESET', 'delta_ref']


class OperatingPoint(namedtuple('_OperatingPoint', _OPERATING_FIELDS,
                                defaults=[300.0, 10e3, 0.35, 10e-9, 0.78, 10e-9, -0.78, 10e-9, 5e-3])):
    '''
    Bias, timing and temperature of one experiment. Defaults are the reference experiment.
    '''

    def validate(self):
        if not self.R_G > 0:
            raise ConfigError('R_G must be positive, got {}'.format(self.R_G))
        if not (self.t_READ > 0 and self.t_SET > 0 and self.t_RESET >= 0):
            raise ConfigError('pulse widths must be positive')
        if not (self.V_READ > 0 and self.V_SET > 0):
            raise ConfigError('V_READ and V_SET must be positive')
        if not self.V_RESET < 0:
            raise ConfigError('V_RESET must be negative, got {}'.format(self.V_RESET))
        if self.delta_ref < 0:
            raise ConfigError('delta_ref must be non-negative')
        if not self.T > 0:
            raise ConfigError('T must be positive')
        return self
