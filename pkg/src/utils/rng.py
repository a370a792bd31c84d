"""
随机数工具模块
基于计数器的可重放随机流：同一键和计数器总是给出同一组随机数
"""

import numpy as np

# 随机流用途标签，写进计数器的最高字，保证不同用途的流互不重叠
STREAM_LINK_NOISE = 1
STREAM_ORACLE = 2
STREAM_TOPOLOGY = 3
STREAM_DATA = 4
STREAM_TRIAL = 5
STREAM_CERTIFY = 6


def derive_seed(*keys):
    """
    由若干非负整数键派生一个 64 位种子

    Args:
        *keys (int): 键序列，例如 (master_seed, trial)

    Returns:
        int: 派生出的 64 位整数种子
    """
    seq = np.random.SeedSequence([int(k) & 0xFFFFFFFFFFFFFFFF for k in keys])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def philox_key(seed):
    """
    把 64 位种子扩展为 Philox 的 128 位密钥

    Returns:
        np.ndarray: 长度为 2 的 uint64 数组
    """
    return np.random.SeedSequence(int(seed)).generate_state(2, dtype=np.uint64)


def counter_generator(key, stream, t, lane=0):
    """
    按 (密钥, 用途, 轮次, 通道) 定位一条随机流

    计数器的第 0 字留给 Philox 自增，其余三字依次放通道、轮次与用途，
    所以同一轮内不同通道、不同轮次、不同用途的流在计数空间里互不相交。

    Args:
        key (np.ndarray): philox_key 的结果
        stream (int): 用途标签
        t (int): 轮次
        lane (int): 通道编号（如智能体或链路编号）

    Returns:
        np.random.Generator: 随机数生成器
    """
    counter = np.array([0, int(lane), int(t), int(stream)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def seeded_generator(*keys):
    """
    普通的派生生成器，用于数据生成、随机图与复核起点等非逐轮场景

    Returns:
        np.random.Generator: 随机数生成器
    """
    return np.random.default_rng(np.random.SeedSequence([int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]))
