#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "vinecg/deptools.hpp"
#include "vinecg/sampler.hpp"
#include "vinecg/vcg.hpp"

namespace vinecg {

/// Serialize to the canonical versioned JSON document: vertices sorted by
/// (|cond|, left, right), keys sorted, shortest round-trip decimals.
/// save(load(save(m))) is byte-identical.
std::string save(const VineModel& m);

/// Parse, schema-check and structurally validate a model document.
/// Throws DataError (naming the offending field or byte offset) or
/// StructureError (embedding the validation report).
VineModel load(std::string_view text);

/// CSV ingestion: first row is the header, cells are numeric, at least two
/// data rows.  Column order and names are preserved.
DataMatrix read_csv(std::istream& in);
DataMatrix read_csv_file(const std::string& path);

/// CSV with LF line endings and shortest round-trip decimals.
void write_csv(std::ostream& out, const std::vector<std::string>& names, const SampleBatch& batch);

}  // namespace vinecg
