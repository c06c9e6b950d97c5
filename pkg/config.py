# PARAMETERS TO CONTROL THE BEHAVIOR OF THE SIMULATOR
# DO NOT REMOVE OR RENAME THIS FILE
# EVERY VALUE BELOW CAN BE OVERRIDDEN FROM A RUN CONFIGURATION FILE (SEE README)
# THE DEVICE AND THE DEFAULT OPERATING POINT LIVE IN mtj/params.py
# MONTE CARLO CAMPAIGN
NUM_TRIALS = 1000
MASTER_SEED = 20220516
# DESIGN-SPACE GRID; VOLTAGE RANGES ARE (START, STOP, STEP) IN VOLTS
SWEEP_R_G = [5e3, 10e3, 15e3, 20e3, 25e3, 30e3]
SWEEP_V_READ = (0.2, 1.0, 0.025)
SWEEP_V_SET = (0.5, 1.3, 0.01)
SWEEP_T = [250.0, 275.0, 300.0, 325.0, 350.0]
TARGET_WER = 1e-7
# BIAS POINT OF THE TEMPERATURE STUDY
TEMPERATURE_R_G = 15e3
TEMPERATURE_V_READ = 0.375
TEMPERATURE_V_SET = 0.89
# DEVICE CHARACTERIZATION; V_MTJ GRID IS (START, STOP, STEP), PULSE IN SECONDS
CHARACTERIZE_V_MTJ = (0.3, 1.2, 0.01)
CHARACTERIZE_PULSE = 10e-9
# CALIBRATION ANCHORS, ALL AT R_G = 10 kOHM, V_READ = 0.35 V, 10 ns PULSES, 300 K
ANCHOR_RDR_00 = 8.9e-10
ANCHOR_WER_00 = 1e-7
ANCHOR_V_SET = 0.78
ANCHOR_RM_3SIGMA = 10.6e-3
ANCHOR_ENERGY_11 = 113.9e-15
CALIBRATION_MAX_LOOPS = 10
CALIBRATION_REL_TOL = 1e-3
# RESULTS ARE WRITTEN HERE; FORMAT IS "csv" OR "json"
OUTPUT_DIRECTORY = "results"
OUTPUT_FORMAT = "csv"
RUN_LOG_FILENAME = "run_log"
