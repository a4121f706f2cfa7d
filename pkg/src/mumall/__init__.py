"""Proof-theoretic model checking with least and greatest fixed points."""
