#include "langgeo/formats.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace langgeo {

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (auto b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open '" + path.string() + "' for reading");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw ValidationError("failed writing '" + path.string() + "'");
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string read_text_file(const std::filesystem::path& path)
{
    const auto bytes = read_file(path);
    return {bytes.begin(), bytes.end()};
}

namespace {

class Writer {
public:
    void raw(const char* s, std::size_t n) { m_bytes.insert(m_bytes.end(), s, s + n); }

    template <typename T>
    void uint(T value)
    {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            m_bytes.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i)));
        }
    }

    void f64(double value) { uint(std::bit_cast<std::uint64_t>(value)); }
    void f32(float value) { uint(std::bit_cast<std::uint32_t>(value)); }

    void string(const std::string& s)
    {
        if (s.size() > 0xffff) {
            throw ValidationError("string longer than 65535 bytes cannot be serialized");
        }
        uint(static_cast<std::uint16_t>(s.size()));
        raw(s.data(), s.size());
    }

    void bytes(std::span<const std::uint8_t> b) { m_bytes.insert(m_bytes.end(), b.begin(), b.end()); }

    std::vector<std::uint8_t> finish()
    {
        uint(fnv1a64(m_bytes));
        return std::move(m_bytes);
    }

private:
    std::vector<std::uint8_t> m_bytes;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> bytes, const char* magic, const char* what) : m_what(what)
    {
        // Checksum first so corruption anywhere is reported as such.
        if (bytes.size() < 4 + 4 + 8) {
            throw FormatError(FormatErrorKind::truncated, bytes.size(),
                              std::string(what) + " is " + std::to_string(bytes.size()) + " bytes, too short for a header");
        }
        if (std::memcmp(bytes.data(), magic, 4) != 0) {
            throw FormatError(FormatErrorKind::bad_magic, 0, std::string("expected ") + what + " magic '" + magic + "'");
        }
        m_body = bytes.first(bytes.size() - 8);
        m_offset = 4;
        const std::uint32_t version = uint<std::uint32_t>();
        if (version != format_version) {
            throw FormatError(FormatErrorKind::unsupported_version, 4,
                              std::string(what) + " version " + std::to_string(version) + " is not supported");
        }
        m_stored_checksum = 0;
        for (std::size_t i = 0; i < 8; ++i) {
            m_stored_checksum |= std::uint64_t{bytes[bytes.size() - 8 + i]} << (8 * i);
        }
    }

    /// Call once the header fields describing the payload size are known.
    void verify_checksum() const
    {
        if (fnv1a64(m_body) != m_stored_checksum) {
            throw FormatError(FormatErrorKind::checksum_mismatch, m_body.size(),
                              std::string(m_what) + " checksum does not match its contents");
        }
    }

    void need(std::uint64_t n, const char* field) const
    {
        if (n > m_body.size() - m_offset) {
            throw FormatError(FormatErrorKind::truncated, m_offset,
                              std::string(m_what) + " ends inside " + field + ": need " + std::to_string(n)
                                  + " bytes, " + std::to_string(m_body.size() - m_offset) + " remain");
        }
    }

    template <typename T>
    T uint(const char* field = "header")
    {
        need(sizeof(T), field);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= std::uint64_t{m_body[m_offset + i]} << (8 * i);
        }
        m_offset += sizeof(T);
        return static_cast<T>(v);
    }

    double f64(const char* field) { return std::bit_cast<double>(uint<std::uint64_t>(field)); }
    float f32(const char* field) { return std::bit_cast<float>(uint<std::uint32_t>(field)); }

    std::string string(const char* field)
    {
        const auto len = uint<std::uint16_t>(field);
        need(len, field);
        std::string s(reinterpret_cast<const char*>(m_body.data() + m_offset), len);
        m_offset += len;
        return s;
    }

    std::span<const std::uint8_t> bytes(std::uint64_t n, const char* field)
    {
        need(n, field);
        auto out = m_body.subspan(m_offset, n);
        m_offset += n;
        return out;
    }

    /// The remaining byte count must equal `expected` exactly.
    void expect_remaining(std::uint64_t expected, const char* field) const
    {
        const std::uint64_t remaining = m_body.size() - m_offset;
        if (remaining < expected) {
            throw FormatError(FormatErrorKind::truncated, m_offset,
                              std::string(m_what) + " " + field + " is " + std::to_string(remaining)
                                  + " bytes, expected " + std::to_string(expected));
        }
        if (remaining > expected) {
            throw FormatError(FormatErrorKind::malformed, m_offset,
                              std::string(m_what) + " " + field + " is " + std::to_string(remaining)
                                  + " bytes, expected " + std::to_string(expected) + " (length overrun)");
        }
    }

    void finish() const { expect_remaining(0, "trailer"); }

    std::uint64_t offset() const noexcept { return m_offset; }
    std::uint64_t remaining() const noexcept { return m_body.size() - m_offset; }

private:
    std::span<const std::uint8_t> m_body;
    std::uint64_t m_offset = 0;
    std::uint64_t m_stored_checksum = 0;
    const char* m_what;
};

} // namespace

// --- .lgv ------------------------------------------------------------------

std::vector<std::uint8_t> encode_vector(const BinaryLanguageVector& vector)
{
    validate_layout(vector);
    Writer w;
    w.raw("LGV1", 4);
    w.uint(format_version);
    w.string(vector.tags.language);
    w.string(vector.tags.model);
    w.string(vector.tags.corpus);
    w.uint(static_cast<std::uint32_t>(vector.layout.size()));
    for (const auto& block : vector.layout) {
        w.uint(static_cast<std::uint64_t>(block.layer_id));
        w.uint(block.bit_length);
    }
    w.uint(static_cast<std::uint64_t>(vector.bits.size()));
    w.bytes(vector.bits.to_bytes());
    return w.finish();
}

BinaryLanguageVector decode_vector(std::span<const std::uint8_t> bytes)
{
    Reader r(bytes, "LGV1", "vector file");
    BinaryLanguageVector v;
    v.tags.language = r.string("language tag");
    v.tags.model = r.string("model tag");
    v.tags.corpus = r.string("corpus tag");
    const auto layers = r.uint<std::uint32_t>("layer count");
    if (static_cast<std::uint64_t>(layers) * 16 > r.remaining()) {
        throw FormatError(FormatErrorKind::truncated, r.offset(),
                          "vector file declares " + std::to_string(layers) + " layers but is too short");
    }
    std::uint64_t cursor = 0;
    for (std::uint32_t l = 0; l < layers; ++l) {
        const auto id = static_cast<std::int64_t>(r.uint<std::uint64_t>("layer table"));
        const auto len = r.uint<std::uint64_t>("layer table");
        v.layout.push_back({id, cursor, len});
        cursor += len;
    }
    const auto total = r.uint<std::uint64_t>("bit length");
    if (total != cursor) {
        throw FormatError(FormatErrorKind::malformed, r.offset() - 8,
                          "layer table covers " + std::to_string(cursor) + " bits but the vector declares "
                              + std::to_string(total));
    }
    const std::uint64_t payload = (total + 7) / 8;
    r.expect_remaining(payload, "payload");
    r.verify_checksum();
    const auto data = r.bytes(payload, "payload");
    if (!BitVector::from_bytes(data, static_cast<std::size_t>(total), v.bits)) {
        throw FormatError(FormatErrorKind::malformed, r.offset() - 1, "padding bits in the last payload byte are set");
    }
    r.finish();
    try {
        validate_layout(v);
    } catch (const ValidationError& e) {
        throw FormatError(FormatErrorKind::malformed, 0, e.what());
    }
    return v;
}

void write_vector(const std::filesystem::path& path, const BinaryLanguageVector& vector)
{
    write_file(path, encode_vector(vector));
}

BinaryLanguageVector read_vector(const std::filesystem::path& path)
{
    try {
        return decode_vector(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(e.kind(), e.offset(), path.string() + ": " + e.detail());
    }
}

// --- .lgd ------------------------------------------------------------------

std::vector<std::uint8_t> encode_matrix(const MaskedDistanceMatrix& matrix)
{
    validate(matrix);
    const auto n = static_cast<std::uint64_t>(matrix.size());
    Writer w;
    w.raw("LGD1", 4);
    w.uint(format_version);
    w.uint(static_cast<std::uint32_t>(n));
    for (const auto& label : matrix.labels) {
        w.string(label);
    }
    w.uint(static_cast<std::uint32_t>(matrix.provenance.size()));
    for (const auto& p : matrix.provenance) {
        w.string(p.model);
        w.string(p.corpus);
    }
    for (Eigen::Index i = 0; i < matrix.size(); ++i) {
        for (Eigen::Index j = 0; j < matrix.size(); ++j) {
            w.f64(matrix.values(i, j));
        }
    }
    BitVector mask(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < matrix.size(); ++i) {
        for (Eigen::Index j = 0; j < matrix.size(); ++j) {
            mask.set(static_cast<std::size_t>(i * matrix.size() + j), matrix.observed(i, j));
        }
    }
    w.bytes(mask.to_bytes());
    return w.finish();
}

MaskedDistanceMatrix decode_matrix(std::span<const std::uint8_t> bytes)
{
    Reader r(bytes, "LGD1", "matrix file");
    const auto n = r.uint<std::uint32_t>("size");
    MaskedDistanceMatrix m;
    if (n > r.remaining() / 2) {
        throw FormatError(FormatErrorKind::truncated, r.offset(),
                          "matrix file declares " + std::to_string(n) + " labels but is too short");
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        m.labels.push_back(r.string("label list"));
    }
    const auto provenance = r.uint<std::uint32_t>("provenance count");
    if (provenance > r.remaining() / 4) {
        throw FormatError(FormatErrorKind::truncated, r.offset(), "provenance list is longer than the file");
    }
    for (std::uint32_t p = 0; p < provenance; ++p) {
        Provenance entry;
        entry.model = r.string("provenance");
        entry.corpus = r.string("provenance");
        m.provenance.push_back(std::move(entry));
    }
    const std::uint64_t cells = std::uint64_t{n} * n;
    r.expect_remaining(cells * 8 + (cells + 7) / 8, "payload");
    r.verify_checksum();
    m.values.resize(n, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            m.values(i, j) = r.f64("values");
        }
    }
    BitVector mask;
    if (!BitVector::from_bytes(r.bytes((cells + 7) / 8, "mask"), static_cast<std::size_t>(cells), mask)) {
        throw FormatError(FormatErrorKind::malformed, r.offset() - 1, "padding bits in the mask are set");
    }
    m.observed.resize(n, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            m.observed(i, j) = mask.test(std::size_t{i} * n + j);
        }
    }
    r.finish();
    try {
        validate(m);
    } catch (const ValidationError& e) {
        throw FormatError(FormatErrorKind::malformed, 0, e.what());
    }
    return m;
}

void write_matrix(const std::filesystem::path& path, const MaskedDistanceMatrix& matrix)
{
    write_file(path, encode_matrix(matrix));
}

MaskedDistanceMatrix read_matrix(const std::filesystem::path& path)
{
    try {
        return decode_matrix(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(e.kind(), e.offset(), path.string() + ": " + e.detail());
    }
}

std::string matrix_to_csv(const MaskedDistanceMatrix& matrix)
{
    std::string out = "language";
    for (const auto& label : matrix.labels) {
        out += ',' + csv_field(label);
    }
    out += '\n';
    for (Eigen::Index i = 0; i < matrix.size(); ++i) {
        out += csv_field(matrix.labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < matrix.size(); ++j) {
            out += ',';
            if (matrix.observed(i, j)) {
                out += format_double(matrix.values(i, j));
            }
        }
        out += '\n';
    }
    return out;
}

// --- .lgt ------------------------------------------------------------------

std::vector<std::uint8_t> encode_tensors(const std::vector<Tensor>& tensors)
{
    Writer w;
    w.raw("LGT1", 4);
    w.uint(format_version);
    w.uint(static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        w.string(t.name);
        w.uint(static_cast<std::uint64_t>(t.layer_id));
        w.uint(static_cast<std::uint8_t>(t.type));
        w.uint(static_cast<std::uint64_t>(t.data.rows()));
        w.uint(static_cast<std::uint64_t>(t.data.cols()));
        for (Eigen::Index i = 0; i < t.data.rows(); ++i) {
            for (Eigen::Index j = 0; j < t.data.cols(); ++j) {
                if (t.type == TensorType::f32) {
                    w.f32(static_cast<float>(t.data(i, j)));
                } else {
                    w.f64(t.data(i, j));
                }
            }
        }
    }
    return w.finish();
}

std::vector<Tensor> decode_tensors(std::span<const std::uint8_t> bytes)
{
    Reader r(bytes, "LGT1", "tensor file");
    r.verify_checksum();
    const auto count = r.uint<std::uint32_t>("tensor count");
    std::vector<Tensor> tensors;
    for (std::uint32_t k = 0; k < count; ++k) {
        Tensor t;
        t.name = r.string("tensor name");
        t.layer_id = static_cast<std::int64_t>(r.uint<std::uint64_t>("tensor header"));
        const auto type = r.uint<std::uint8_t>("tensor header");
        if (type != 1 && type != 2) {
            throw FormatError(FormatErrorKind::malformed, r.offset() - 1,
                              "unknown tensor element type " + std::to_string(type));
        }
        t.type = static_cast<TensorType>(type);
        const auto rows = r.uint<std::uint64_t>("tensor header");
        const auto cols = r.uint<std::uint64_t>("tensor header");
        const std::uint64_t width = t.type == TensorType::f32 ? 4 : 8;
        if (cols != 0 && rows > r.remaining() / width / cols) {
            throw FormatError(FormatErrorKind::truncated, r.offset(),
                              "tensor '" + t.name + "' declares " + std::to_string(rows) + "x" + std::to_string(cols)
                                  + " values but only " + std::to_string(r.remaining()) + " bytes remain");
        }
        t.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index i = 0; i < t.data.rows(); ++i) {
            for (Eigen::Index j = 0; j < t.data.cols(); ++j) {
                t.data(i, j) = t.type == TensorType::f32 ? static_cast<double>(r.f32("tensor data")) : r.f64("tensor data");
            }
        }
        tensors.push_back(std::move(t));
    }
    r.finish();
    return tensors;
}

void write_tensors(const std::filesystem::path& path, const std::vector<Tensor>& tensors)
{
    write_file(path, encode_tensors(tensors));
}

std::vector<Tensor> read_tensors(const std::filesystem::path& path)
{
    try {
        return decode_tensors(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(e.kind(), e.offset(), path.string() + ": " + e.detail());
    }
}

// --- CSV -------------------------------------------------------------------

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            quoted = true;
            field_started = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            if (field_started || !field.empty() || !row.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            field_started = false;
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (quoted) {
        throw ValidationError("CSV ends inside a quoted field");
    }
    if (field_started || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_field(const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

std::string format_double(double value)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return {buf, end};
}

double parse_double(const std::string& text)
{
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ValidationError("'" + text + "' is not a number");
    }
    return value;
}

LabeledPartition parse_partition_csv(const std::string& text)
{
    auto rows = parse_csv(text);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != 2) {
            throw ValidationError("partition CSV row " + std::to_string(r + 1) + " has " + std::to_string(row.size())
                                  + " fields, expected 2");
        }
        if (r == 0 && row[0] == "language" && row[1] == "label") {
            continue;
        }
        pairs.emplace_back(row[0], row[1]);
    }
    if (pairs.empty()) {
        throw ValidationError("partition CSV has no rows");
    }
    return LabeledPartition::from_pairs(pairs);
}

std::string partition_to_csv(const LabeledPartition& partition)
{
    validate(partition);
    std::string out = "language,label\n";
    for (std::size_t i = 0; i < partition.size(); ++i) {
        out += csv_field(partition.languages[i]) + ','
             + csv_field(partition.label_names[static_cast<std::size_t>(partition.labels[i])]) + '\n';
    }
    return out;
}

std::string embedding_to_csv(const Embedding& embedding)
{
    std::string out = "language";
    for (Eigen::Index j = 0; j < embedding.dimension(); ++j) {
        out += ",y_" + std::to_string(j + 1);
    }
    out += '\n';
    for (Eigen::Index i = 0; i < embedding.size(); ++i) {
        out += csv_field(embedding.labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < embedding.dimension(); ++j) {
            out += ',' + format_double(embedding.coordinates(i, j));
        }
        out += '\n';
    }
    return out;
}

Embedding parse_embedding_csv(const std::string& text)
{
    const auto rows = parse_csv(text);
    if (rows.empty() || rows[0].empty() || rows[0][0] != "language") {
        throw ValidationError("embedding CSV must start with a 'language,y_1,...' header");
    }
    const auto d = static_cast<Eigen::Index>(rows[0].size() - 1);
    Embedding e;
    e.coordinates.resize(static_cast<Eigen::Index>(rows.size() - 1), d);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != d + 1) {
            throw ValidationError("embedding CSV row " + std::to_string(r + 1) + " has the wrong number of fields");
        }
        e.labels.push_back(rows[r][0]);
        for (Eigen::Index j = 0; j < d; ++j) {
            e.coordinates(static_cast<Eigen::Index>(r - 1), j) = parse_double(rows[r][static_cast<std::size_t>(j + 1)]);
        }
    }
    e.eigenvalues = e.coordinates.colwise().squaredNorm().transpose();
    return e;
}

nlohmann::json embedding_sidecar(const Embedding& embedding)
{
    auto to_list = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    return {{"epsilon", embedding.epsilon},
            {"dimension", embedding.dimension()},
            {"eigenvalues", to_list(embedding.eigenvalues)},
            {"dropped_spectrum", to_list(embedding.dropped_spectrum)}};
}

void apply_sidecar(const nlohmann::json& sidecar, Embedding& embedding)
{
    try {
        const auto eig = sidecar.at("eigenvalues").get<std::vector<double>>();
        const auto dropped = sidecar.at("dropped_spectrum").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(eig.size()) != embedding.dimension()) {
            throw ValidationError("sidecar eigenvalue count does not match the embedding dimension");
        }
        embedding.eigenvalues = Eigen::Map<const Eigen::VectorXd>(eig.data(), static_cast<Eigen::Index>(eig.size()));
        embedding.dropped_spectrum
            = Eigen::Map<const Eigen::VectorXd>(dropped.data(), static_cast<Eigen::Index>(dropped.size()));
        embedding.epsilon = sidecar.at("epsilon").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed embedding sidecar: ") + e.what());
    }
}

std::string confusion_to_csv(const ConfusionMatrix& confusion)
{
    std::string out = "cluster";
    for (const auto& name : confusion.col_names) {
        out += ',' + csv_field(name);
    }
    out += '\n';
    for (Eigen::Index i = 0; i < confusion.counts.rows(); ++i) {
        out += csv_field(confusion.row_names[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < confusion.counts.cols(); ++j) {
            out += ',' + std::to_string(confusion.counts(i, j));
        }
        out += '\n';
    }
    return out;
}

} // namespace langgeo
