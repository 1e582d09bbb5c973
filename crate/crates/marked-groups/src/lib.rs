//! Computational toolkit for finitely generated marked groups.
//!
//! A marked group is a group together with an ordered tuple of generators,
//! or equivalently a normal subgroup of a free group. This crate provides
//! word-problem oracles for a catalog of concrete families, Cayley-ball
//! construction with canonical certificates, finite-resolution metrics on
//! the space of marked groups, growth tables, group-property probes, and an
//! engine for the Grigorchuk family of binary-tree automorphism groups
//! parameterized by ternary sequences.

pub mod words;
