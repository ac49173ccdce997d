EPOCHS = 800
LR_SCHEDULE = ((200, 1e-4), (400, 5e-5), (200, 1e-5))  # (epoch span, learning rate)
BATCH_SIZE = 128
OPTIMIZER = "adam"

SCALE_C = 2.0  # targets are divided by c so tanh can represent them
N_CONV_LAYERS = 10
HIDDEN_MAPS = 64
FILTER_SIDE = 3

# torch convention: running = (1 - momentum) * running + momentum * batch
BN_MOMENTUM = 0.1
BN_EPS = 1e-5

CEU_LENGTH = 4  # coherence intervals per SPR channel estimation unit
SFT_INTERVALS = 2  # current + previous interval

INFERENCE_BATCH = 512
