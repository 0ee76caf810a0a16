from .mic import MicConfig, mic, mic_exact_oracle, mic_gain
