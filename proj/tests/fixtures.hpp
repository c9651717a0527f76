#pragma once

#include <string_view>

namespace gg::test {

// Processed student table as published (one fail, row 9).
inline constexpr std::string_view kFig2Processed =
    "merit,gender,percent,type,class\n"
    "good,Male,distinction,AI,pass\n"
    "good,Female,distinction,AI,pass\n"
    "good,Male,distinction,AI,pass\n"
    "good,Male,distinction,AI,pass\n"
    "good,Male,distinction,AI,pass\n"
    "bad,Male,distinction,OTHER,pass\n"
    "good,Male,distinction,OTHER,pass\n"
    "good,Male,distinction,OTHER,pass\n"
    "good,Male,distinction,OTHER,fail\n"
    "good,Male,distinction,OTHER,pass\n"
    "good,Male,distinction,OTHER,pass\n";

// The first eleven raw rows with the labels of the processed table attached.
inline constexpr std::string_view kFig2Raw =
    "sr_no,merit_no,merit_marks,app_id,name,gender,cast,location,percent,type,class\n"
    "1,328,153.00,EN10205034,AKSHAY DEBNATH,Male,Open,Mumbai,95.66,AI,pass\n"
    "2,725,152.00,EN10279070,YEMPALLE SUSHMA BASWARAJ,Female,Open,Mumbai,86.66,AI,pass\n"
    "3,1066,143.00,EN10288911,KIRAN SUSHIL GRIFFITHS,Male,Open,Mumbai,96.00,AI,pass\n"
    "4,1294,136.00,EN10167854,WALCHALE ABHJEET SUHAS,Male,Open,Mumbai,82.00,AI,pass\n"
    "5,1419,132.00,EN10255786,KUNAL JADHAV,Male,Open,Mumbai,80.33,AI,pass\n"
    "6,21566,109.00,EN10230782,KARKHELE RAVINDRAKUMAR VITTHAL,Male,NT 3 (NT-D),Mumbai,83.66,GNT3H,PASS\n"
    "7,3290,156.00,EN10172564,TALAWADEKAR ADITYA SHYAM,Male,OBC,Mumbai,89.33,GOBCH,pass\n"
    "8,5933,144.00,EN10264877,SONAWANE NIKHIL RAJENDRA,Male,SBC/OBC,Mumbai,89.66,GOBCH,pass\n"
    "9,6882,140.00,EN10196064,PATIL SUMEET BHAGWAN,Male,OBC,Mumbai,88.33,GOBCH,fail\n"
    "11,1456,168.00,EN10195904,LOHOTE PRANIT TANAJI,Male,Open,Mumbai,92.00,GOPENH,pass\n"
    "12,2158,162.00,EN10216545,IYER SIDDHARTH SUNDARAM,Male,Open,Mumbai,93.66,GOPENH,pass\n";

}  // namespace gg::test
