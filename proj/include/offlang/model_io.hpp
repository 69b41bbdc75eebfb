#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "offlang/pipeline.hpp"

namespace offlang {

// Versioned binary artifact: magic "OFNS", u32 format version, then
// length-prefixed named sections (config as key=value text, vocabulary and
// terms as line-delimited UTF-8, parameters as little-endian IEEE-754 f64
// arrays with declared shapes). All multi-byte integers little-endian.
inline constexpr char kArtifactMagic[4] = {'O', 'F', 'N', 'S'};
inline constexpr std::uint32_t kArtifactVersion = 1;

std::vector<std::uint8_t> save_model(const TrainedPipeline& pipeline);
std::unique_ptr<TrainedPipeline> load_model(const std::vector<std::uint8_t>& bytes);

// File variants; writes go to a temp file first and rename into place.
void save_model_file(const TrainedPipeline& pipeline, const std::string& path);
std::unique_ptr<TrainedPipeline> load_model_file(const std::string& path);

// Atomic text write used by every command that produces an output file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace offlang
