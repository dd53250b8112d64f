from pathos.multiprocessing import ProcessingPool as Pool
from typing import Callable, Iterable, List, TypeVar

Item = TypeVar("Item")
Result = TypeVar("Result")


def parallel_map(func: Callable[[Item], Result], items: Iterable[Item], workers: int = 1) -> List[Result]:
    """
    Applies func to every item on a pool of at most `workers` processes.
    :return: the results, in the order of the items regardless of completion order.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    process_pool = Pool(min(workers, len(items)))
    try:
        results = process_pool.map(func, items)
    finally:
        process_pool.close()
        process_pool.join()
        # pathos caches pools by size, a closed one must not be handed out again
        process_pool.clear()
    return list(results)
