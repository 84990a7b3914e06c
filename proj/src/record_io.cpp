// SPDX-License-Identifier: Apache-2.0
//
// irsce: cascaded IRS channel estimation and training design
// Copyright (C) 2026 The irsce authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "irsce/harness/record_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace irsce::harness {

namespace {

static_assert(std::endian::native == std::endian::little, "record I/O assumes a little-endian host");

void put(std::ofstream &out, const CMatrix<double> &A)
{
    for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i)
        {
            const double v[2] = {A(i, j).real(), A(i, j).imag()};
            out.write(reinterpret_cast<const char *>(v), sizeof v);
        }
}

void get(std::ifstream &in, CMatrix<double> &A, Index rows, Index cols)
{
    A.resize(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
        {
            double v[2];
            if (!in.read(reinterpret_cast<char *>(v), sizeof v))
                throw std::runtime_error("record: truncated binary file");
            A(i, j) = {v[0], v[1]};
        }
}

} // namespace

void write_record(const std::string &prefix, const StoredRecord &rec)
{
    const CMatrix<double> *arrays[] = {&rec.record.samples, &rec.channel.direct, &rec.channel.bs_irs,
                                       &rec.channel.irs_user};
    const char *names[] = {"samples", "direct", "bs_irs", "irs_user"};

    nlohmann::json meta;
    meta["format"] = "irsce-record";
    meta["version"] = 1;
    meta["dtype"] = "complex128-le-interleaved";
    meta["order"] = "column-major";
    meta["dims"] = {{"M", rec.record.dims.M}, {"N", rec.record.dims.N}, {"K", rec.record.dims.K}};
    meta["noise_variance"] = rec.record.noise_variance;
    std::size_t offset = 0;
    for (int a = 0; a < 4; ++a)
    {
        meta["arrays"].push_back({{"name", names[a]},
                                  {"shape", {arrays[a]->rows(), arrays[a]->cols()}},
                                  {"offset", offset}});
        offset += std::size_t(arrays[a]->size()) * 16;
    }

    std::ofstream bin(prefix + ".bin", std::ios::binary);
    if (!bin)
        throw std::runtime_error("record: cannot open " + prefix + ".bin");
    for (const auto *A : arrays)
        put(bin, *A);
    std::ofstream js(prefix + ".json");
    if (!js)
        throw std::runtime_error("record: cannot open " + prefix + ".json");
    js << meta.dump(2) << '\n';
}

StoredRecord read_record(const std::string &prefix)
{
    std::ifstream js(prefix + ".json");
    if (!js)
        throw std::runtime_error("record: cannot open " + prefix + ".json");
    const nlohmann::json meta = nlohmann::json::parse(js);
    if (meta.at("format") != "irsce-record" || meta.at("version") != 1)
        throw std::runtime_error("record: unsupported sidecar");

    StoredRecord out;
    const auto &d = meta.at("dims");
    out.record.dims = SystemDims::make(d.at("M").get<Index>(), d.at("N").get<Index>(), d.at("K").get<Index>());
    out.record.noise_variance = meta.at("noise_variance").get<double>();

    std::ifstream bin(prefix + ".bin", std::ios::binary);
    if (!bin)
        throw std::runtime_error("record: cannot open " + prefix + ".bin");
    for (const auto &a : meta.at("arrays"))
    {
        const auto name = a.at("name").get<std::string>();
        CMatrix<double> *target = name == "samples"    ? &out.record.samples
                                  : name == "direct"   ? &out.channel.direct
                                  : name == "bs_irs"   ? &out.channel.bs_irs
                                  : name == "irs_user" ? &out.channel.irs_user
                                                       : nullptr;
        if (!target)
            throw std::runtime_error("record: unknown array " + name);
        bin.seekg(std::streamoff(a.at("offset").get<std::size_t>()));
        get(bin, *target, a.at("shape")[0].get<Index>(), a.at("shape")[1].get<Index>());
    }
    return out;
}

} // namespace irsce::harness
