// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

/// Errors produced by the benchmark core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("expected {expected} entries (one per ring site), got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state has dimension {got}, expected 2^{qubits}")]
    DimensionMismatch { qubits: usize, got: usize },

    #[error("{what} supports at most L = {limit}, requested L = {requested}{hint}")]
    Capacity {
        what: &'static str,
        limit: usize,
        requested: usize,
        hint: &'static str,
    },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("line {line}: syntax error: {message}")]
    QasmSyntax { line: usize, message: String },

    #[error("line {line}: unsupported gate `{name}`")]
    UnsupportedGate { line: usize, name: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("trace grids do not match: {0}")]
    GridMismatch(String),

    #[error("density matrix check failed after step {step}: {message}")]
    Diagnostic { step: usize, message: String },
}

pub type Result<T> = core::result::Result<T, Error>;
