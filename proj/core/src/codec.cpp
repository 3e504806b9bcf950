#include "loratk/codec.hpp"

#include <openssl/evp.h>
#include <openssl/params.h>

#include <cstring>
#include <memory>

namespace loratk {

namespace {

constexpr std::size_t kMinFrameLen = 12;  // MHDR + FHDR(7) + MIC(4)

bool is_data_type(MessageType t) {
    switch (t) {
        case MessageType::UnconfirmedDataUp:
        case MessageType::UnconfirmedDataDown:
        case MessageType::ConfirmedDataUp:
        case MessageType::ConfirmedDataDown:
            return true;
        default:
            return false;
    }
}

bool is_downlink_type(MessageType t) {
    return t == MessageType::UnconfirmedDataDown || t == MessageType::ConfirmedDataDown;
}

std::array<std::uint8_t, 16> aes128_encrypt_block(
    const Key128& key, const std::array<std::uint8_t, 16>& block) {
    std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(
        EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
    if (!ctx) throw CodecError("AES context allocation failed");
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.data(),
                           nullptr) != 1)
        throw CodecError("AES init failed");
    EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
    std::array<std::uint8_t, 16> out{};
    int len = 0;
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, block.data(), 16) != 1 ||
        len != 16)
        throw CodecError("AES block encryption failed");
    return out;
}

std::array<std::uint8_t, 16> aes128_cmac(const Key128& key,
                                         std::span<const std::uint8_t> msg) {
    std::unique_ptr<EVP_MAC, decltype(&EVP_MAC_free)> mac(
        EVP_MAC_fetch(nullptr, "CMAC", nullptr), EVP_MAC_free);
    if (!mac) throw CodecError("CMAC unavailable");
    std::unique_ptr<EVP_MAC_CTX, decltype(&EVP_MAC_CTX_free)> ctx(
        EVP_MAC_CTX_new(mac.get()), EVP_MAC_CTX_free);
    if (!ctx) throw CodecError("CMAC context allocation failed");
    char cipher_name[] = "AES-128-CBC";
    OSSL_PARAM params[] = {
        OSSL_PARAM_construct_utf8_string("cipher", cipher_name, 0),
        OSSL_PARAM_construct_end()};
    if (EVP_MAC_init(ctx.get(), key.data(), key.size(), params) != 1)
        throw CodecError("CMAC init failed");
    if (EVP_MAC_update(ctx.get(), msg.data(), msg.size()) != 1)
        throw CodecError("CMAC update failed");
    std::array<std::uint8_t, 16> out{};
    std::size_t out_len = 0;
    if (EVP_MAC_final(ctx.get(), out.data(), &out_len, out.size()) != 1 ||
        out_len != 16)
        throw CodecError("CMAC final failed");
    return out;
}

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

std::vector<std::uint8_t> serialize_msg(const PhyFrame& frame) {
    if ((frame.fctrl & 0x0F) != frame.fopts.size())
        throw MalformedFrame("FCtrl FOpts length does not match FOpts size");
    std::vector<std::uint8_t> out;
    out.reserve(8 + frame.fopts.size() + 1 + frame.frm_payload.size());
    out.push_back(frame.mhdr);
    put_u32_le(out, frame.dev_addr);
    out.push_back(frame.fctrl);
    out.push_back(static_cast<std::uint8_t>(frame.fcnt & 0xFF));
    out.push_back(static_cast<std::uint8_t>(frame.fcnt >> 8));
    out.insert(out.end(), frame.fopts.begin(), frame.fopts.end());
    if (frame.fport) {
        out.push_back(*frame.fport);
        out.insert(out.end(), frame.frm_payload.begin(), frame.frm_payload.end());
    }
    return out;
}

}  // namespace

const Key128& generic_key() {
    static const Key128 key = {0x2B, 0x7E, 0x15, 0x16, 0x28, 0xAE, 0xD2, 0xA6,
                               0xAB, 0xF7, 0x15, 0x88, 0x09, 0xCF, 0x4F, 0x3C};
    return key;
}

SessionKeys SessionKeys::generic() { return {generic_key(), generic_key()}; }

PhyFrame parse_phy_payload(std::span<const std::uint8_t> raw) {
    if (raw.size() < kMinFrameLen)
        throw TruncatedFrame("PHY payload of " + std::to_string(raw.size()) +
                             " bytes is below the 12-byte minimum");
    PhyFrame frame;
    frame.mhdr = raw[0];
    if (frame.major_version() != 0)
        throw MalformedFrame("unsupported LoRaWAN major version " +
                             std::to_string(frame.major_version()));
    if (!is_data_type(frame.message_type()))
        throw MalformedFrame("MHDR type " +
                             std::to_string(static_cast<int>(frame.message_type())) +
                             " is not a data frame");
    frame.dev_addr = static_cast<std::uint32_t>(raw[1]) |
                     static_cast<std::uint32_t>(raw[2]) << 8 |
                     static_cast<std::uint32_t>(raw[3]) << 16 |
                     static_cast<std::uint32_t>(raw[4]) << 24;
    frame.fctrl = raw[5];
    frame.fcnt = static_cast<std::uint16_t>(raw[6] | raw[7] << 8);
    const std::size_t fopts_len = frame.fctrl & 0x0F;
    if (8 + fopts_len + 4 > raw.size())
        throw MalformedFrame("FOpts length " + std::to_string(fopts_len) +
                             " exceeds remaining frame bytes");
    frame.fopts.assign(raw.begin() + 8, raw.begin() + 8 + fopts_len);
    std::size_t pos = 8 + fopts_len;
    const std::size_t mic_pos = raw.size() - 4;
    if (pos < mic_pos) {
        frame.fport = raw[pos++];
        frame.frm_payload.assign(raw.begin() + pos, raw.begin() + mic_pos);
    }
    std::memcpy(frame.mic.data(), raw.data() + mic_pos, 4);
    return frame;
}

std::vector<std::uint8_t> serialize(const PhyFrame& frame) {
    std::vector<std::uint8_t> out = serialize_msg(frame);
    out.insert(out.end(), frame.mic.begin(), frame.mic.end());
    return out;
}

std::array<std::uint8_t, 4> compute_mic(const PhyFrame& frame,
                                        const Key128& nwk_s_key) {
    const std::vector<std::uint8_t> msg = serialize_msg(frame);
    std::vector<std::uint8_t> b0;
    b0.reserve(16 + msg.size());
    b0.push_back(0x49);
    b0.insert(b0.end(), 4, 0x00);
    b0.push_back(is_downlink_type(frame.message_type()) ? 0x01 : 0x00);
    put_u32_le(b0, frame.dev_addr);
    put_u32_le(b0, frame.fcnt);  // 16-bit counter, high bytes zero
    b0.push_back(0x00);
    b0.push_back(static_cast<std::uint8_t>(msg.size()));
    b0.insert(b0.end(), msg.begin(), msg.end());
    const auto cmac = aes128_cmac(nwk_s_key, b0);
    return {cmac[0], cmac[1], cmac[2], cmac[3]};
}

bool verify_mic(const PhyFrame& frame, const Key128& nwk_s_key) {
    return compute_mic(frame, nwk_s_key) == frame.mic;
}

std::vector<std::uint8_t> frm_payload_crypt(std::span<const std::uint8_t> data,
                                            const Key128& key,
                                            std::uint32_t dev_addr,
                                            std::uint32_t fcnt, bool downlink) {
    std::vector<std::uint8_t> out(data.begin(), data.end());
    for (std::size_t block = 0; block * 16 < out.size(); ++block) {
        std::array<std::uint8_t, 16> a{};
        a[0] = 0x01;
        a[5] = downlink ? 0x01 : 0x00;
        a[6] = static_cast<std::uint8_t>(dev_addr & 0xFF);
        a[7] = static_cast<std::uint8_t>((dev_addr >> 8) & 0xFF);
        a[8] = static_cast<std::uint8_t>((dev_addr >> 16) & 0xFF);
        a[9] = static_cast<std::uint8_t>((dev_addr >> 24) & 0xFF);
        a[10] = static_cast<std::uint8_t>(fcnt & 0xFF);
        a[11] = static_cast<std::uint8_t>((fcnt >> 8) & 0xFF);
        a[12] = static_cast<std::uint8_t>((fcnt >> 16) & 0xFF);
        a[13] = static_cast<std::uint8_t>((fcnt >> 24) & 0xFF);
        a[15] = static_cast<std::uint8_t>(block + 1);
        const auto keystream = aes128_encrypt_block(key, a);
        const std::size_t limit = std::min<std::size_t>(16, out.size() - block * 16);
        for (std::size_t i = 0; i < limit; ++i)
            out[block * 16 + i] ^= keystream[i];
    }
    return out;
}

std::vector<std::uint8_t> decrypt_frm_payload(const PhyFrame& frame,
                                              const Key128& app_s_key) {
    if (!frame.fport)
        throw CodecError("frame carries no FPort, nothing to decrypt");
    return frm_payload_crypt(frame.frm_payload, app_s_key, frame.dev_addr,
                             frame.fcnt, is_downlink_type(frame.message_type()));
}

DecodedFrame decode(std::span<const std::uint8_t> raw, const Key128& key) {
    if (raw.size() < kMinFrameLen)
        throw TruncatedFrame("PHY payload of " + std::to_string(raw.size()) +
                             " bytes is below the 12-byte minimum");
    DecodedFrame out;
    out.mhdr = raw[0];
    const auto type = static_cast<MessageType>(raw[0] >> 5);
    if (!is_data_type(type)) return out;  // joins and proprietary stay opaque
    out.frame = parse_phy_payload(raw);
    out.mic_ok = verify_mic(*out.frame, key);
    if (out.frame->fport) out.plaintext = decrypt_frm_payload(*out.frame, key);
    return out;
}

DecodedFrame decode_generic(std::span<const std::uint8_t> raw) {
    return decode(raw, generic_key());
}

}  // namespace loratk
