# Reference system settings: 32x16 ULA link, 2 RF chains per side, 64 subcarriers at 100 MHz.
N_TX = 32
N_RX = 16
N_TX_RF = 2
N_RX_RF = 2
N_SUBCARRIERS = 64
SAMPLE_RATE_HZ = 100e6
CARRIER_HZ = 28e9
SPACING_RATIO = 0.5
INTERVAL_S = 1e-4  # coherence interval T; 0.5 ms would clamp rho to 0 at f_d = 1400 Hz
DEFAULT_GAIN_VAR = 1.0
FIRST_BESSEL_ZERO = 2.404825557695773
