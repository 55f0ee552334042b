#pragma once

// On-disk formats. All integers are little-endian; every binary container
// ends with a 64-bit FNV-1a checksum over all preceding bytes.
//
// .lgv  binary language vector
//   "LGV1" | u32 version | 3 x (u16 len, utf-8) language, model, corpus
//   | u32 layer count | per layer (i64 layer_id, u64 bit length)
//   | u64 total bits N | ceil(N/8) payload bytes, LSB-first | u64 checksum
//
// .lgd  masked distance matrix
//   "LGD1" | u32 version | u32 n | n x (u16 len, utf-8) labels
//   | u32 provenance count | per entry 2 x (u16 len, utf-8) model, corpus
//   | n*n f64 values, row-major | ceil(n*n/8) mask bytes, LSB-first | u64 checksum
//
// .lgt  tensor container (layer dumps and importance scores)
//   "LGT1" | u32 version | u32 tensor count
//   | per tensor (u16 len, utf-8) name, i64 layer_id, u8 dtype (1 = f32, 2 = f64),
//     u64 rows, u64 cols, rows*cols values row-major | u64 checksum

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "langgeo/binarizer.hpp"
#include "langgeo/clustering.hpp"
#include "langgeo/mds.hpp"
#include "langgeo/metricspace.hpp"

namespace langgeo {

inline constexpr std::uint32_t format_version = 1;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// --- .lgv ------------------------------------------------------------------

std::vector<std::uint8_t> encode_vector(const BinaryLanguageVector& vector);
BinaryLanguageVector decode_vector(std::span<const std::uint8_t> bytes);
void write_vector(const std::filesystem::path& path, const BinaryLanguageVector& vector);
BinaryLanguageVector read_vector(const std::filesystem::path& path);

// --- .lgd ------------------------------------------------------------------

std::vector<std::uint8_t> encode_matrix(const MaskedDistanceMatrix& matrix);
MaskedDistanceMatrix decode_matrix(std::span<const std::uint8_t> bytes);
void write_matrix(const std::filesystem::path& path, const MaskedDistanceMatrix& matrix);
MaskedDistanceMatrix read_matrix(const std::filesystem::path& path);

/// Header row "language,<labels>"; unobserved cells are empty.
std::string matrix_to_csv(const MaskedDistanceMatrix& matrix);

// --- .lgt ------------------------------------------------------------------

enum class TensorType : std::uint8_t { f32 = 1, f64 = 2 };

struct Tensor {
    std::string name;
    std::int64_t layer_id = 0;
    TensorType type = TensorType::f64;
    Eigen::MatrixXd data; ///< f32 payloads are widened on read
};

std::vector<std::uint8_t> encode_tensors(const std::vector<Tensor>& tensors);
std::vector<Tensor> decode_tensors(std::span<const std::uint8_t> bytes);
void write_tensors(const std::filesystem::path& path, const std::vector<Tensor>& tensors);
std::vector<Tensor> read_tensors(const std::filesystem::path& path);

// --- CSV -------------------------------------------------------------------

std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_field(const std::string& field);
/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

/// "language,label" rows; a leading header row with those names is optional.
LabeledPartition parse_partition_csv(const std::string& text);
std::string partition_to_csv(const LabeledPartition& partition);

/// Header "language,y_1,...,y_d", one row per language.
std::string embedding_to_csv(const Embedding& embedding);
/// Coordinates and labels only; spectrum comes from the sidecar.
Embedding parse_embedding_csv(const std::string& text);

/// {"epsilon", "dimension", "eigenvalues", "dropped_spectrum"}
nlohmann::json embedding_sidecar(const Embedding& embedding);
void apply_sidecar(const nlohmann::json& sidecar, Embedding& embedding);

std::string confusion_to_csv(const ConfusionMatrix& confusion);

} // namespace langgeo
