"""Constructive RBM and DBN synthesis and the supporting combinatorics."""
