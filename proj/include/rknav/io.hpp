#pragma once
#include <string>

#include "rknav/bvp.hpp"
#include "rknav/control.hpp"
#include "rknav/geodesics.hpp"
#include "rknav/manifold.hpp"
#include "rknav/path.hpp"

// Serialization.  Two formats:
//   - tabular paths: one header row, then one row per sample with columns
//     s, x1..xm, v1..vm, conserved, residual, tab-separated, %.17g floats
//     (lossless round trip);
//   - structured JSON documents, each stamped with a "format" version field
//     ("rknav.path.v1", "rknav.solutions.v1", ...).  Keys are emitted in
//     sorted order and floats by shortest round-trip form, so identical
//     inputs produce identical bytes.

namespace rknav {

//----------------------------------------------------------- tabular paths

std::string path_table(const GeodesicPath& p);

// Inverse of path_table.  Metadata that the table does not carry
// (parametrization, eps, lengths) is left at defaults unless the caller
// restores it.  Throws ConfigError on malformed input.
GeodesicPath path_from_table(const std::string& text);

//----------------------------------------------------------- JSON documents

// Serialized JSON text (trailing newline included).
std::string path_document(const GeodesicPath& p);
GeodesicPath path_from_document(const std::string& text);

std::string signal_document(const ControlSignal& u);
ControlSignal signal_from_document(const std::string& text);

// Solution list from a multi-start run plus per-class continuations.
// Continuation traces are matched to solutions by winding.
std::string solution_document(const MultiStartOutcome& out,
                              const std::vector<ContinuationTrace>& traces,
                              const std::string& manifold_name, double eps0);

std::string trace_document(const ContinuationTrace& t);

std::string certificate_document(const ConvexityCertificate& c);

std::string assumption_document(const AssumptionReport& r);

//----------------------------------------------------------------- files

// Writes content to path, creating parent directories.  Throws ConfigError
// when the file cannot be created.
void write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Fixed-width float formatting used across all documents: %.17g.
std::string format_float(double v);

}  // namespace rknav
