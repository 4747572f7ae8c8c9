"""EIP-1559 base fee rule (integer arithmetic, fee units = wei)."""

from __future__ import annotations

BASE_FEE_MAX_CHANGE_DENOMINATOR = 8


def base_fee_update(parent_base_fee: int, parent_gas_used: int, gas_target: int) -> int:
    """Next block's base fee.

    The fee moves by ``parent * (used - target) / target / 8``: at most 12.5%
    per block. Increases are at least 1 wei and the fee never drops below 1.
    """
    if parent_base_fee <= 0 or gas_target <= 0 or parent_gas_used < 0:
        raise ValueError("base fee and gas target must be positive, gas used non-negative")
    if parent_gas_used == gas_target:
        return parent_base_fee
    if parent_gas_used > gas_target:
        delta = (parent_base_fee * (parent_gas_used - gas_target)
                 // gas_target // BASE_FEE_MAX_CHANGE_DENOMINATOR)
        return parent_base_fee + max(delta, 1)
    delta = (parent_base_fee * (gas_target - parent_gas_used)
             // gas_target // BASE_FEE_MAX_CHANGE_DENOMINATOR)
    return max(parent_base_fee - delta, 1)
