#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "flytts/tensor.hpp"

namespace flytts {

// Raised on weight-container problems: bad magic, version or dtype mismatch,
// truncation, checksum failure, dangling aliases.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Named tensor container with explicit storage sharing. Parameters live in
// storage cells; layer slots resolve to storages through an alias table, so
// one storage may back many slots. Parameter counts sum distinct storages
// only, which makes sharing arithmetic directly countable.
class WeightStore {
public:
    // Adds a storage cell. Duplicate names are rejected.
    void add_storage(std::string name, FrameTensor t);

    // Binds a slot to a storage cell. The storage may be added later; all
    // bindings are validated on lookup, save and count.
    void bind(std::string slot, std::string storage);

    // add_storage + identity binding, for unshared parameters.
    void add(const std::string& name, FrameTensor t);

    bool has(const std::string& slot) const;
    const FrameTensor& at(const std::string& slot) const;
    const std::string& storage_name_of(const std::string& slot) const;

    FrameTensor& storage(const std::string& name);
    const FrameTensor& storage(const std::string& name) const;
    bool has_storage(const std::string& name) const { return storages_.count(name) != 0; }

    const std::map<std::string, FrameTensor>& storages() const { return storages_; }
    const std::map<std::string, std::string>& slots() const { return slots_; }

    // Element count over distinct storages; aliased slots count once.
    std::int64_t parameter_count() const;

    // Same, grouped by the prefix before the first '.' of the storage name.
    std::map<std::string, std::int64_t> parameter_count_by_module() const;

    // Number of distinct storages backing the given slots.
    int distinct_storage_count(std::span<const std::string> slot_names) const;

    void validate() const;  // throws FormatError on dangling aliases

    bool operator==(const WeightStore& other) const;

private:
    std::map<std::string, FrameTensor> storages_;
    std::map<std::string, std::string> slots_;
};

inline std::int64_t count_parameters(const WeightStore& store) {
    return store.parameter_count();
}

// Binary container: magic, version, storage table (name/dtype/shape), alias
// table, little-endian float32 payload, FNV-1a 64 checksum of everything
// before it. Round trips are bit-exact.
std::vector<std::uint8_t> save_weights(const WeightStore& store);
WeightStore load_weights(std::span<const std::uint8_t> bytes);

void save_weights_file(const WeightStore& store, const std::string& path);
WeightStore load_weights_file(const std::string& path);

}  // namespace flytts
