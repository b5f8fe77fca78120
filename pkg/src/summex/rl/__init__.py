"""Actor-critic planner: state encoding, network, training and inference."""
