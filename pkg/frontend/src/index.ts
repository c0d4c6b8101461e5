export {
  ApiError,
  ScefisClient,
  type FeedbackResult,
  type FetchLike,
  type Metrics,
  type ProjectStatus,
  type ReviewItem,
  type RuleBaseDump,
} from "./client.js";
export { DEFAULT_HISTORY_LIMIT, MaskEditor, type BrushMode } from "./editor.js";
export {
  base64ToBytes,
  bytesToBase64,
  decodeGrayPng,
  encodeGrayPng,
  type GrayImage,
} from "./png.js";
export {
  jaccardSeries,
  methodMeans,
  progress,
  ruleTraceSeries,
  runningMean,
  type BarSeries,
  type Point,
} from "./charts.js";
