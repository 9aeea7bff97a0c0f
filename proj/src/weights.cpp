#include "flytts/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <set>

#include "flytts/rng.hpp"

namespace flytts {

namespace {

constexpr char kMagic[4] = {'F', 'L', 'Y', 'W'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kDtypeF32 = 0;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    void floats(std::span<float> out) {
        need(out.size() * 4);
        for (size_t i = 0; i < out.size(); ++i) {
            std::uint32_t v = 0;
            for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes_[pos_ + 4 * i + b]) << (8 * b);
            out[i] = std::bit_cast<float>(v);
        }
        pos_ += out.size() * 4;
    }
    size_t pos() const { return pos_; }
    size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(size_t n) const {
        if (pos_ + n > bytes_.size()) throw FormatError("weight container truncated");
    }
    std::span<const std::uint8_t> bytes_;
    size_t pos_ = 0;
};

}  // namespace

void WeightStore::add_storage(std::string name, FrameTensor t) {
    if (storages_.count(name)) {
        throw std::invalid_argument("WeightStore: duplicate storage '" + name + "'");
    }
    storages_.emplace(std::move(name), std::move(t));
}

void WeightStore::bind(std::string slot, std::string storage) {
    if (slots_.count(slot)) {
        throw std::invalid_argument("WeightStore: duplicate slot '" + slot + "'");
    }
    slots_.emplace(std::move(slot), std::move(storage));
}

void WeightStore::add(const std::string& name, FrameTensor t) {
    add_storage(name, std::move(t));
    bind(name, name);
}

bool WeightStore::has(const std::string& slot) const {
    auto it = slots_.find(slot);
    return it != slots_.end() && storages_.count(it->second) != 0;
}

const std::string& WeightStore::storage_name_of(const std::string& slot) const {
    auto it = slots_.find(slot);
    if (it == slots_.end()) {
        throw std::out_of_range("WeightStore: unknown slot '" + slot + "'");
    }
    return it->second;
}

const FrameTensor& WeightStore::at(const std::string& slot) const {
    const std::string& storage_name = storage_name_of(slot);
    auto it = storages_.find(storage_name);
    if (it == storages_.end()) {
        throw FormatError("WeightStore: slot '" + slot + "' aliases missing storage '" + storage_name + "'");
    }
    return it->second;
}

FrameTensor& WeightStore::storage(const std::string& name) {
    auto it = storages_.find(name);
    if (it == storages_.end()) {
        throw std::out_of_range("WeightStore: unknown storage '" + name + "'");
    }
    return it->second;
}

const FrameTensor& WeightStore::storage(const std::string& name) const {
    auto it = storages_.find(name);
    if (it == storages_.end()) {
        throw std::out_of_range("WeightStore: unknown storage '" + name + "'");
    }
    return it->second;
}

void WeightStore::validate() const {
    for (const auto& [slot, storage_name] : slots_) {
        if (!storages_.count(storage_name)) {
            throw FormatError("WeightStore: slot '" + slot + "' aliases missing storage '" + storage_name +
                              "'");
        }
    }
}

std::int64_t WeightStore::parameter_count() const {
    validate();
    std::int64_t n = 0;
    for (const auto& [name, t] : storages_) n += t.numel();
    return n;
}

std::map<std::string, std::int64_t> WeightStore::parameter_count_by_module() const {
    validate();
    std::map<std::string, std::int64_t> by_module;
    for (const auto& [name, t] : storages_) {
        by_module[name.substr(0, name.find('.'))] += t.numel();
    }
    return by_module;
}

int WeightStore::distinct_storage_count(std::span<const std::string> slot_names) const {
    std::set<std::string> distinct;
    for (const auto& slot : slot_names) distinct.insert(storage_name_of(slot));
    return static_cast<int>(distinct.size());
}

bool WeightStore::operator==(const WeightStore& other) const {
    if (slots_ != other.slots_) return false;
    if (storages_.size() != other.storages_.size()) return false;
    auto it = storages_.begin();
    auto jt = other.storages_.begin();
    for (; it != storages_.end(); ++it, ++jt) {
        if (it->first != jt->first || it->second.shape != jt->second.shape) return false;
        if (std::memcmp(it->second.data.data(), jt->second.data.data(),
                        it->second.data.size() * sizeof(float)) != 0) {
            return false;
        }
    }
    return true;
}

std::vector<std::uint8_t> save_weights(const WeightStore& store) {
    store.validate();
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kVersion);

    put_u32(out, static_cast<std::uint32_t>(store.storages().size()));
    for (const auto& [name, t] : store.storages()) {
        put_string(out, name);
        out.push_back(kDtypeF32);
        out.push_back(static_cast<std::uint8_t>(t.rank()));
        for (int i = 0; i < t.rank(); ++i) put_u32(out, static_cast<std::uint32_t>(t.dim(i)));
    }

    put_u32(out, static_cast<std::uint32_t>(store.slots().size()));
    for (const auto& [slot, storage] : store.slots()) {
        put_string(out, slot);
        put_string(out, storage);
    }

    for (const auto& [name, t] : store.storages()) {
        for (float v : t.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
    }

    put_u64(out, fnv1a64(out.data(), out.size()));
    return out;
}

WeightStore load_weights(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 + 4) throw FormatError("weight container truncated");
    const std::uint64_t stored_sum = [&] {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(bytes[bytes.size() - 8 + i]) << (8 * i);
        }
        return v;
    }();
    if (fnv1a64(bytes.data(), bytes.size() - 8) != stored_sum) {
        throw FormatError("weight container checksum mismatch");
    }

    Reader r(bytes.first(bytes.size() - 8));
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.u8());
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("weight container magic mismatch");
    if (r.u32() != kVersion) throw FormatError("weight container version mismatch");

    struct Entry {
        std::string name;
        std::vector<int> shape;
    };
    const std::uint32_t n_storages = r.u32();
    std::vector<Entry> entries;
    entries.reserve(n_storages);
    for (std::uint32_t i = 0; i < n_storages; ++i) {
        Entry e;
        e.name = r.str();
        if (r.u8() != kDtypeF32) throw FormatError("weight container dtype unsupported");
        const int rank = r.u8();
        for (int d = 0; d < rank; ++d) e.shape.push_back(static_cast<int>(r.u32()));
        entries.push_back(std::move(e));
    }

    const std::uint32_t n_slots = r.u32();
    std::vector<std::pair<std::string, std::string>> slot_pairs;
    slot_pairs.reserve(n_slots);
    for (std::uint32_t i = 0; i < n_slots; ++i) {
        auto slot = r.str();
        auto storage = r.str();
        slot_pairs.emplace_back(std::move(slot), std::move(storage));
    }

    WeightStore store;
    for (auto& e : entries) {
        FrameTensor t(e.shape);
        r.floats(t.flat());
        store.add_storage(e.name, std::move(t));
    }
    for (auto& [slot, storage] : slot_pairs) store.bind(slot, storage);
    if (r.remaining() != 0) throw FormatError("weight container has trailing bytes");
    store.validate();
    return store;
}

void save_weights_file(const WeightStore& store, const std::string& path) {
    const auto bytes = save_weights(store);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw FormatError("short write to '" + path + "'");
}

WeightStore load_weights_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw FormatError("cannot open weight file '" + path + "'");
    const std::streamsize size = f.tellg();
    f.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<size_t>(size));
    f.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!f) throw FormatError("short read from '" + path + "'");
    return load_weights(bytes);
}

}  // namespace flytts
