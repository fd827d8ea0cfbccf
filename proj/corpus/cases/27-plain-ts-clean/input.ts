export function clamp<T extends number>(value: T, min: T, max: T): number {
  return value < min ? min : value > max ? max : value;
}

export const isEmpty = (xs: Array<string>): boolean => xs.length === 0;
