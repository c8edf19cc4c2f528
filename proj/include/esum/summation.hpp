#pragma once

// Compensated accumulation and deterministic chunked parallel reduction.
//
// Every reduction in this library follows the same recipe: the index range is
// cut into chunks of a fixed size (independent of the thread count), each
// chunk is mapped to a partial result, and the partials are combined by a
// pairwise tree in chunk order.  The result is bit-for-bit identical no
// matter how many worker threads run.

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <thread>
#include <vector>

namespace esum {

// Kahan-Babuska (Neumaier) compensated sum.
template <class T = double>
struct kahan_sum {
    T sum{0};
    T cor{0};

    void add(T x) {
        const T t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            cor += (sum - t) + x;
        else
            cor += (x - t) + sum;
        sum = t;
    }
    T value() const { return sum + cor; }
};

struct kahan_complex {
    kahan_sum<double> re, im;

    void add(std::complex<double> z) {
        re.add(z.real());
        im.add(z.imag());
    }
    std::complex<double> value() const { return {re.value(), im.value()}; }
};

// Global worker cap.  0 means "machine parallelism".
inline std::atomic<int>& thread_cap_storage() {
    static std::atomic<int> cap{0};
    return cap;
}

inline void set_thread_cap(int n) { thread_cap_storage().store(n); }

inline int worker_count() {
    int cap = thread_cap_storage().load();
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (cap <= 0) return static_cast<int>(hw);
    return cap < static_cast<int>(hw) ? cap : static_cast<int>(hw);
}

// Runs fn(chunk_index, lo, hi) over [0, count) cut into fixed-size chunks.
// Chunks are claimed by an atomic counter; each writes only its own output,
// so scheduling order cannot affect results.
template <class Fn>
void parallel_chunks(std::uint64_t count, std::uint64_t chunk_size, Fn&& fn) {
    if (count == 0) return;
    const std::uint64_t n_chunks = (count + chunk_size - 1) / chunk_size;
    const int workers =
        static_cast<int>(std::min<std::uint64_t>(n_chunks, worker_count()));

    if (workers <= 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
            const std::uint64_t lo = c * chunk_size;
            const std::uint64_t hi = std::min(count, lo + chunk_size);
            fn(c, lo, hi);
        }
        return;
    }

    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            const std::uint64_t lo = c * chunk_size;
            const std::uint64_t hi = std::min(count, lo + chunk_size);
            fn(c, lo, hi);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 0; i + 1 < workers; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

// Pairwise tree combine in index order: ((p0+p1)+(p2+p3))+... The shape
// depends only on the chunk count, never on thread scheduling.
template <class R, class Combine>
R tree_combine(std::vector<R> parts, R identity, Combine comb) {
    if (parts.empty()) return identity;
    while (parts.size() > 1) {
        std::vector<R> up;
        up.reserve((parts.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2)
            up.push_back(comb(parts[i], parts[i + 1]));
        if (parts.size() % 2 == 1) up.push_back(parts.back());
        parts.swap(up);
    }
    return parts[0];
}

// Map-reduce over [1, count] (1-based math indexing) with the fixed chunk /
// tree-combine discipline.
template <class R, class Map, class Combine>
R chunked_map_reduce(std::uint64_t count, std::uint64_t chunk_size, R identity,
                     Map map, Combine comb) {
    if (count == 0) return identity;
    const std::uint64_t n_chunks = (count + chunk_size - 1) / chunk_size;
    std::vector<R> parts(n_chunks, identity);
    parallel_chunks(count, chunk_size,
                    [&](std::uint64_t c, std::uint64_t lo, std::uint64_t hi) {
                        parts[c] = map(lo + 1, hi);  // [lo+1, hi] inclusive
                    });
    return tree_combine(std::move(parts), identity, comb);
}

}  // namespace esum
