"""Linear algebra over H_path ⊗ H_spin ⊗ H_energy."""
