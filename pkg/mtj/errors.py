'''
Exceptions raised by the simulator.
'''


class SimulationError(RuntimeError):
    '''Base class for every simulator failure.'''


class ConfigError(SimulationError):
    '''Invalid configuration: unknown keys, out-of-range parameters, missing PTAT entries.'''


class DomainError(SimulationError, ValueError):
    '''An input lies outside the range the model is defined on.'''


class ModelError(SimulationError):
    '''The parameter set puts the device model in an invalid regime.'''


class SolverError(SimulationError):
    '''The node solver did not converge.'''

    def __init__(self, message, residual=None, trial=None):
        super().__init__(message)
        self.residual = residual
        self.trial = trial


class SearchError(SimulationError):
    '''A root search could not bracket its target.'''


class CalibrationError(SimulationError):
    '''A calibration fit failed for one named constant.'''

    def __init__(self, constant, message):
        super().__init__('{}: {}'.format(constant, message))
        self.constant = constant
