N_MC = 2000  # Monte-Carlo realizations per SNR point
CI_Z = 1.96  # 95% normal-approximation confidence
MC_CHUNK = 250  # realizations drawn and estimated together

SWEEP_SNR_DB = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
COVARIANCE_N_MC = 4096  # draws behind the ideal MMSE covariance

TOOLKIT_VERSION = "1.0.0"
