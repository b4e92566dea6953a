"""Classical emulator of the dynamical Ansatz tree approach for the heat equation."""
