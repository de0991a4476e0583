"""RISC-U machine: instruction set, BTOR2 model generator, reference simulator, sample programs."""
