// Frame-number <-> time display math. The backend owns the canonical
// conversion; this mirrors it for read-only display (first millisecond of a
// frame at the document's rate, 25 fps by default).

export function frameToMs(frameIndex: number, fps = 25): number {
  return Math.ceil((frameIndex * 1000) / fps);
}

export function msToFrame(timeMs: number, fps = 25): number {
  return Math.floor((timeMs * fps) / 1000);
}

export function timecode(frameIndex: number, fps = 25): string {
  const seconds = frameToMs(frameIndex, fps) / 1000;
  return `${seconds.toFixed(2)} s`;
}
